#include "jdd/tensor_image.hpp"

namespace jdd {

torch::Tensor to_tensor(const RgbImage& image, torch::Dtype dtype) {
    auto hwc = torch::from_blob(const_cast<double*>(image.data.data()), {image.height, image.width, 3},
                                torch::TensorOptions().dtype(torch::kFloat64));
    return hwc.permute({2, 0, 1}).to(dtype, /*non_blocking=*/false, /*copy=*/true).contiguous();
}

RgbImage from_tensor(const torch::Tensor& tensor) {
    auto t = tensor.dim() == 4 ? tensor.squeeze(0) : tensor;
    if (t.dim() != 3 || t.size(0) != 3) throw ValidationError("from_tensor: expected a (3,H,W) tensor");
    auto hwc = t.detach().to(torch::kFloat64).permute({1, 2, 0}).contiguous();
    RgbImage out(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)));
    std::copy(hwc.data_ptr<double>(), hwc.data_ptr<double>() + hwc.numel(), out.data.begin());
    return out;
}

}  // namespace jdd
