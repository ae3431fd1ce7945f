#pragma once

#include <torch/torch.h>

namespace jdd::color {

/// Guard used inside square roots, atan2 and zero-chroma hue handling so that
/// gradients stay finite everywhere. Values are unchanged except where the
/// guarded quantity is below this threshold.
inline constexpr double kGuardEps = 1e-12;

/// Differentiable sRGB -> CIELAB for (N,3,H,W) tensors in [0,1]; same chain and
/// constants as the scalar srgb_to_lab.
torch::Tensor srgb_to_lab(const torch::Tensor& rgb);

/// Differentiable CIEDE2000 between (N,3,H,W) Lab tensors; returns (N,H,W).
torch::Tensor ciede2000(const torch::Tensor& lab1, const torch::Tensor& lab2);

}  // namespace jdd::color
