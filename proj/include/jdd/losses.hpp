#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace jdd::loss {

struct LossWeights {
    double lambda_G = 1e-4;
};

/// Which terms of the objective are active; disabled terms report 0.
struct LossTerms {
    bool pcl = true;
    bool rfl = true;
    bool gan = true;
};

/// Image the total-variation regulator is computed on.
enum class TvOperand { Output, Reference };

/// One layer of a VGG-style feature stack.
struct ExtractorLayer {
    enum class Kind { Conv, Pool } kind = Kind::Conv;
    int64_t out_channels = 0;
    std::string name;  ///< conv layers are named relu<block>_<index>, pools pool<block>
};

/// Layer plan of VGG-19's convolutional trunk.
std::vector<ExtractorLayer> vgg19_plan();

struct FeatureExtractorSpec {
    /// Last layer evaluated (e.g. "pool3", "relu2_2").
    std::string layer_id = "pool3";
    /// Parameter file (see FeatureExtractor::save). Empty selects a frozen,
    /// seed-initialized trunk. Relative paths are resolved against $JDD_CACHE.
    std::string weights_path;
    std::uint64_t init_seed = 0;
    /// Custom layer plan; empty means VGG-19.
    std::vector<ExtractorLayer> plan;
};

/// Frozen VGG-style feature trunk truncated at `layer_id`.
class FeatureExtractorImpl : public torch::nn::Module {
public:
    explicit FeatureExtractorImpl(const FeatureExtractorSpec& spec);

    torch::Tensor forward(const torch::Tensor& x);

    const FeatureExtractorSpec& spec() const { return spec_; }
    /// FNV-1a hash of the weights file (0 when seed-initialized).
    std::uint64_t weights_hash() const { return weights_hash_; }
    /// Writes the trunk's parameters in the format `weights_path` expects.
    void save(const std::filesystem::path& path) const;

    torch::nn::Sequential trunk{nullptr};

private:
    FeatureExtractorSpec spec_;
    std::uint64_t weights_hash_ = 0;
};
TORCH_MODULE(FeatureExtractor);

/// Resolves a weights path against $JDD_CACHE when it is relative and not
/// present relative to the working directory.
std::filesystem::path resolve_weights_path(const std::string& path);

/// Per-step objective values.
struct LossReport {
    double L_R = 0.0;
    double L_RFL = 0.0;
    double L_PCL = 0.0;
    double L_G = 0.0;
    double lambda_R = 0.0;
    double L_T = 0.0;
};

void to_json(nlohmann::json& j, const LossReport& r);

/// Mean absolute error over all elements.
torch::Tensor reconstruction_loss(const torch::Tensor& reference, const torch::Tensor& output);

/// Mean absolute difference of extractor activations; the reference branch
/// carries no gradient.
torch::Tensor feature_loss(const torch::Tensor& reference, const torch::Tensor& output, FeatureExtractor& extractor);

/// (sum |vertical diffs| + sum |horizontal diffs|) / (H_j W_j C_j), averaged
/// over the batch. Returned detached: it acts as an adaptive weight.
torch::Tensor tv_regulator(const torch::Tensor& image, int64_t feat_h, int64_t feat_w, int64_t feat_c);

struct RflParts {
    torch::Tensor value;     ///< lambda_R * feature loss
    torch::Tensor lambda_R;  ///< detached
    torch::Tensor feature;
};

RflParts regularized_feature_loss(const torch::Tensor& reference, const torch::Tensor& output,
                                  FeatureExtractor& extractor, TvOperand operand = TvOperand::Output);

/// Mean per-pixel CIEDE2000 between two sRGB batches.
torch::Tensor perceptual_colour_loss(const torch::Tensor& reference, const torch::Tensor& output);

inline constexpr double kProbEps = 1e-7;

/// -mean log D(fake pair).
torch::Tensor generator_adversarial_loss(const torch::Tensor& d_fake);
/// -mean[log D(real pair) + log(1 - D(fake pair))].
torch::Tensor discriminator_loss(const torch::Tensor& d_real, const torch::Tensor& d_fake);

struct TotalLoss {
    torch::Tensor value;  ///< differentiable L_T
    LossReport report;
};

struct TotalLossOptions {
    LossWeights weights;
    LossTerms terms;
    TvOperand tv_operand = TvOperand::Output;
};

/// L_T = L_R + L_RFL + L_PCL + lambda_G * L_G. `d_fake` is the discriminator's
/// output on the generated pair; `extractor` may be null when RFL is off.
TotalLoss total_loss(const torch::Tensor& reference, const torch::Tensor& output, const torch::Tensor& d_fake,
                     FeatureExtractor* extractor, const TotalLossOptions& opts = {});

}  // namespace jdd::loss
