#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace jdd::net {

/// Architecture hyperparameters for the generator and discriminator.
struct NetworkConfig {
    std::vector<int64_t> depths{64, 128, 256};
    int64_t group_density = 3;         ///< DABs per GDAB
    int64_t reduction = 16;            ///< depth-attention squeeze ratio
    int64_t bottleneck_expansion = 2;
    double leaky_slope = 0.2;
    int64_t disc_layers = 6;
    int64_t disc_base_width = 64;
    /// When false, depth and spatial attention are removed from the graph.
    bool attention = true;

    /// Throws ValidationError on an inconsistent configuration.
    void validate() const;
    /// Spatial sizes must be multiples of this (2^(number of downsamples)).
    int64_t size_multiple() const { return int64_t{1} << (depths.size() - 1); }

    bool operator==(const NetworkConfig&) const = default;
};

void to_json(nlohmann::json& j, const NetworkConfig& cfg);
/// Rejects unknown keys; missing keys keep their defaults.
void from_json(const nlohmann::json& j, NetworkConfig& cfg);

/// Initial bias of the squeeze layer; keeps every hidden unit active at start.
inline constexpr double kSqueezeBiasInit = 1.0;

// Channel attention: gate = sigmoid(W_S(relu(W_R(mean_hw(x))))), out = gate * x.
class DepthAttentionImpl : public torch::nn::Module {
public:
    DepthAttentionImpl(int64_t channels, int64_t reduction);

    torch::Tensor forward(const torch::Tensor& x);
    /// Per-channel gates, shape (N, C, 1, 1).
    torch::Tensor gate(const torch::Tensor& x);

    torch::nn::Conv2d squeeze{nullptr};  // W_R: C -> C/r
    torch::nn::Conv2d expand{nullptr};   // W_S: C/r -> C
};
TORCH_MODULE(DepthAttention);

// Per-pixel gate from the channel mean and channel max maps.
class SpatialAttentionImpl : public torch::nn::Module {
public:
    SpatialAttentionImpl();

    torch::Tensor forward(const torch::Tensor& x);
    /// Attention map, shape (N, 1, H, W), values in [0,1].
    torch::Tensor attention_map(const torch::Tensor& x);

    torch::nn::Conv2d conv{nullptr};
};
TORCH_MODULE(SpatialAttention);

// Inverted residual body: 1x1 expand, LeakyReLU, 3x3 depthwise, LeakyReLU, 1x1 project.
class BottleneckImpl : public torch::nn::Module {
public:
    BottleneckImpl(int64_t channels, int64_t expansion, double leaky_slope);

    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d expand{nullptr};
    torch::nn::Conv2d depthwise{nullptr};
    torch::nn::Conv2d project{nullptr};
    double slope;
};
TORCH_MODULE(Bottleneck);

// X' = B(X) + D(X); the D branch is absent when attention is disabled.
class DabImpl : public torch::nn::Module {
public:
    DabImpl(int64_t channels, const NetworkConfig& cfg);

    torch::Tensor forward(const torch::Tensor& x);

    Bottleneck bottleneck{nullptr};
    DepthAttention attention{nullptr};
};
TORCH_MODULE(Dab);

// F_g = W_g F_{g-1} + H_g(F_{g-1}), H_g a chain of `group_density` DABs.
class GdabImpl : public torch::nn::Module {
public:
    GdabImpl(int64_t channels, const NetworkConfig& cfg);

    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d skip{nullptr};
    torch::nn::Sequential chain{nullptr};
};
TORCH_MODULE(Gdab);

class DownsampleImpl : public torch::nn::Module {
public:
    DownsampleImpl(int64_t in_channels, int64_t out_channels);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d conv{nullptr};
};
TORCH_MODULE(Downsample);

// 3x3 conv to 4*out channels, depth-to-space by 2, PReLU.
class UpsampleImpl : public torch::nn::Module {
public:
    UpsampleImpl(int64_t in_channels, int64_t out_channels);
    torch::Tensor forward(const torch::Tensor& x);

    torch::nn::Conv2d conv{nullptr};
    torch::nn::PReLU act{nullptr};
};
TORCH_MODULE(Upsample);

class EncoderStageImpl : public torch::nn::Module {
public:
    EncoderStageImpl(int64_t channels, int64_t next_channels, const NetworkConfig& cfg);

    /// Returns (features kept for the skip connection, downsampled features).
    std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& x);

    Gdab gdab{nullptr};
    SpatialAttention attention{nullptr};
    Downsample down{nullptr};
};
TORCH_MODULE(EncoderStage);

class DecoderStageImpl : public torch::nn::Module {
public:
    DecoderStageImpl(int64_t channels, int64_t deeper_channels, const NetworkConfig& cfg);

    torch::Tensor forward(const torch::Tensor& deeper, const torch::Tensor& skip);

    Upsample up{nullptr};
    torch::nn::Conv2d fuse{nullptr};
    Gdab gdab{nullptr};
};
TORCH_MODULE(DecoderStage);

/// U-Net of GDAB groups mapping a packed (N,3,H,W) mosaic to RGB in [0,1].
class GeneratorImpl : public torch::nn::Module {
public:
    explicit GeneratorImpl(const NetworkConfig& cfg);

    torch::Tensor forward(const torch::Tensor& packed);
    const NetworkConfig& config() const { return cfg_; }

    torch::nn::Conv2d stem{nullptr};
    torch::nn::ModuleList encoder{nullptr};
    Gdab bottom{nullptr};
    torch::nn::ModuleList decoder{nullptr};
    torch::nn::Conv2d head{nullptr};

private:
    NetworkConfig cfg_;
};
TORCH_MODULE(Generator);

/// Conditional critic scoring a (reference, candidate) pair; returns (N,) probabilities.
class DiscriminatorImpl : public torch::nn::Module {
public:
    explicit DiscriminatorImpl(const NetworkConfig& cfg);

    torch::Tensor forward(const torch::Tensor& reference, const torch::Tensor& candidate);
    /// Number of stride-2 layers.
    int64_t halvings() const { return halvings_; }

    torch::nn::Sequential body{nullptr};
    torch::nn::Linear classifier{nullptr};

private:
    int64_t halvings_ = 0;
};
TORCH_MODULE(Discriminator);

int64_t count_parameters(const torch::nn::Module& module);

/// depth-to-space by `factor` (channel c*f*f + i*f + j -> pixel (i, j) of block).
torch::Tensor depth_to_space(const torch::Tensor& x, int64_t factor);
torch::Tensor space_to_depth(const torch::Tensor& x, int64_t factor);

/// Named parameters and buffers of a module as an ordered path -> tensor map.
c10::Dict<std::string, at::Tensor> parameter_map(const torch::nn::Module& module);

/// Copies `stored` into the module's parameters; throws ValidationError if
/// the key sets differ or any shape disagrees.
void load_parameter_map(torch::nn::Module& module, const c10::Dict<std::string, at::Tensor>& stored,
                        const std::string& what);

/// Generator-only checkpoint: config JSON plus parameter map.
void save_generator(const std::filesystem::path& path, const Generator& generator);
Generator load_generator(const std::filesystem::path& path);

/// Reads only the network configuration stored in a checkpoint.
NetworkConfig read_network_config(const std::filesystem::path& path);

}  // namespace jdd::net
