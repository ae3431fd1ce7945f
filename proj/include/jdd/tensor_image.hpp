#pragma once

#include <torch/torch.h>

#include "jdd/image.hpp"

namespace jdd {

/// (3,H,W) tensor of the given dtype from an interleaved RGB image.
torch::Tensor to_tensor(const RgbImage& image, torch::Dtype dtype = torch::kFloat32);

/// Inverse of to_tensor; accepts (3,H,W) or (1,3,H,W).
RgbImage from_tensor(const torch::Tensor& tensor);

}  // namespace jdd
