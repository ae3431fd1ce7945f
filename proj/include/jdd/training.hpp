#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "jdd/dataset.hpp"
#include "jdd/losses.hpp"
#include "jdd/network.hpp"

namespace jdd::train {

/// Pair the discriminator is conditioned on: the ground truth (as the
/// adversarial term is written, D(I_G, I_R)) or the packed mosaic input.
enum class Conditioning { Reference, Input };

struct TrainConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    int64_t batch = 12;
    int64_t epochs = 10;
    /// Total optimisation steps; 0 derives it from `epochs`.
    int64_t steps = 0;
    std::uint64_t seed = 0;
    bool use_attention = true;
    bool use_pcl = true;
    bool use_rfl = true;
    bool use_gan = true;
    double lambda_G = 1e-4;
    loss::TvOperand tv_operand = loss::TvOperand::Output;
    Conditioning conditioning = Conditioning::Reference;
    bool hflip = true;
    int64_t checkpoint_every = 500;
    /// Single-threaded deterministic kernels; makes runs bit-reproducible.
    bool fixed_precision = true;
    std::string feature_layer = "pool3";
    std::string extractor_weights;

    void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

/// Everything `jdd train` needs; the JSON form rejects unknown keys.
struct RunConfig {
    net::NetworkConfig network;
    TrainConfig train;
    std::string train_manifest;
    std::string val_manifest;  ///< optional
    std::string out_dir = "run";
    std::string resume;        ///< optional checkpoint to continue from
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
void from_json(const nlohmann::json& j, RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

/// Raised when the total loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// FNV-1a over the raw bytes of every parameter and buffer, in registration order.
std::uint64_t parameter_hash(const torch::nn::Module& module);

/// Applies the fixed-precision settings (thread count, deterministic kernels).
void apply_precision_mode(bool fixed_precision);

/// Alternating discriminator / generator optimisation over in-memory samples.
class Trainer {
public:
    Trainer(const net::NetworkConfig& network, const TrainConfig& config, std::vector<data::Sample> samples);

    /// One discriminator update (when the adversarial term is on) followed by
    /// one generator update on L_T.
    loss::LossReport step();

    int64_t step_count() const { return step_; }
    int64_t total_steps() const;

    /// Atomic write of all state needed to resume bit-exactly.
    void save_checkpoint(const std::filesystem::path& path) const;
    /// Restores a checkpoint written by save_checkpoint with the same configs.
    void load_checkpoint(const std::filesystem::path& path);

    net::Generator& generator() { return generator_; }
    net::Discriminator& discriminator() { return discriminator_; }
    const net::NetworkConfig& network_config() const { return network_; }
    const TrainConfig& config() const { return config_; }
    std::uint64_t extractor_hash() const;

private:
    std::vector<std::size_t> next_batch();
    std::pair<torch::Tensor, torch::Tensor> assemble(const std::vector<std::size_t>& indices);

    net::NetworkConfig network_;
    TrainConfig config_;
    std::vector<data::Sample> samples_;
    std::vector<torch::Tensor> packed_;
    std::vector<torch::Tensor> clean_;
    std::string pattern_;
    int patch_size_ = 0;

    net::Generator generator_{nullptr};
    net::Discriminator discriminator_{nullptr};
    std::optional<loss::FeatureExtractor> extractor_;
    std::unique_ptr<torch::optim::Adam> opt_g_;
    std::unique_ptr<torch::optim::Adam> opt_d_;

    std::mt19937_64 rng_;
    std::vector<int64_t> order_;
    std::size_t cursor_ = 0;
    int64_t step_ = 0;
};

struct TrainResult {
    std::vector<loss::LossReport> reports;  ///< steps run in this invocation
    std::filesystem::path checkpoint;
};

/// Runs a full training job: loads the manifest, resumes if asked, logs one
/// JSON line per step to out_dir/log.jsonl and checkpoints to
/// out_dir/checkpoint.pt every `checkpoint_every` steps and at the end.
/// `max_steps`, when set, stops early at that global step (used for resumable
/// partial runs).
TrainResult train(const RunConfig& config, std::optional<int64_t> max_steps = std::nullopt);

struct TileOptions {
    int tile = 0;  ///< 0 uses the training patch size stored in the checkpoint
    int overlap = 16;
};

/// Reconstructs a full image; images larger than the tile are processed in
/// overlapping tiles blended with linear ramps.
RgbImage reconstruct(net::Generator& generator, const cfa::MosaicImage& mosaic, int tile, int overlap);

struct InferenceCheckpoint {
    net::Generator generator{nullptr};
    std::string pattern;
    int patch_size = 128;
};

InferenceCheckpoint load_for_inference(const std::filesystem::path& checkpoint);

/// Reconstructs every mosaic and writes `<out_dir>/<stem>.png`; rejects
/// mosaics whose pattern differs from the checkpoint's.
std::vector<std::filesystem::path> infer(const std::filesystem::path& checkpoint,
                                         const std::vector<std::filesystem::path>& mosaics,
                                         const std::filesystem::path& out_dir, const TileOptions& opts = {});

struct AblationCell {
    std::string variant;  ///< Base, +AM, +AM+PCL, +AM+PCL+RFL
    int64_t group_density = 0;
    int64_t parameters = 0;
    double psnr = 0.0;
    double ssim = 0.0;
    double delta_e = 0.0;
    double final_loss = 0.0;
    std::string error;  ///< non-empty when the cell failed
};

std::vector<std::string> ablation_variants();

/// Trains every variant x group density on `train_samples` and scores the
/// result on `val_samples`. Failed cells keep their error and the rest run.
std::vector<AblationCell> ablation_matrix(const std::vector<data::Sample>& train_samples,
                                          const std::vector<data::Sample>& val_samples,
                                          const net::NetworkConfig& base_network, const TrainConfig& base_train,
                                          const std::vector<int64_t>& densities = {1, 2, 3});

std::string format_ablation_table(const std::vector<AblationCell>& cells);

}  // namespace jdd::train
