#include "jdd/training.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "jdd/color.hpp"
#include "jdd/image_io.hpp"
#include "jdd/metrics.hpp"
#include "jdd/tensor_image.hpp"

namespace jdd::train {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& what) {
    if (!j.is_object()) throw ValidationError(what + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ValidationError(what + ": unknown key '" + key + "'");
    }
}

std::string tv_operand_name(loss::TvOperand op) { return op == loss::TvOperand::Output ? "output" : "reference"; }

loss::TvOperand parse_tv_operand(const std::string& s) {
    if (s == "output") return loss::TvOperand::Output;
    if (s == "reference") return loss::TvOperand::Reference;
    throw ValidationError("tv_operand must be 'output' or 'reference'");
}

std::string conditioning_name(Conditioning c) { return c == Conditioning::Reference ? "reference" : "input"; }

Conditioning parse_conditioning(const std::string& s) {
    if (s == "reference") return Conditioning::Reference;
    if (s == "input") return Conditioning::Input;
    throw ValidationError("conditioning must be 'reference' or 'input'");
}

// Train-config fields that may change between a run and its resumption.
json resumable_view(const TrainConfig& cfg) {
    json j = cfg;
    j.erase("steps");
    j.erase("epochs");
    j.erase("checkpoint_every");
    return j;
}

c10::Dict<std::string, at::Tensor> dict_from_ivalue(const c10::IValue& v) {
    c10::Dict<std::string, at::Tensor> out;
    for (const auto& e : v.toGenericDict()) out.insert(e.key().toStringRef(), e.value().toTensor());
    return out;
}

void set_requires_grad(torch::nn::Module& module, bool on) {
    for (auto& p : module.parameters()) p.set_requires_grad(on);
}

}  // namespace

void TrainConfig::validate() const {
    if (!(lr > 0.0) || !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ValidationError("train: lr must be positive and betas in (0,1)");
    }
    if (batch < 1) throw ValidationError("train: batch must be >= 1");
    if (epochs < 1 && steps < 1) throw ValidationError("train: need a positive epoch or step count");
    if (steps < 0) throw ValidationError("train: steps must be non-negative");
    if (lambda_G < 0.0) throw ValidationError("train: lambda_G must be non-negative");
    if (checkpoint_every < 1) throw ValidationError("train: checkpoint_every must be >= 1");
}

void to_json(json& j, const TrainConfig& c) {
    j = {{"lr", c.lr},
         {"beta1", c.beta1},
         {"beta2", c.beta2},
         {"batch", c.batch},
         {"epochs", c.epochs},
         {"steps", c.steps},
         {"seed", c.seed},
         {"use_attention", c.use_attention},
         {"use_pcl", c.use_pcl},
         {"use_rfl", c.use_rfl},
         {"use_gan", c.use_gan},
         {"lambda_G", c.lambda_G},
         {"tv_operand", tv_operand_name(c.tv_operand)},
         {"conditioning", conditioning_name(c.conditioning)},
         {"hflip", c.hflip},
         {"checkpoint_every", c.checkpoint_every},
         {"fixed_precision", c.fixed_precision},
         {"feature_layer", c.feature_layer},
         {"extractor_weights", c.extractor_weights}};
}

void from_json(const json& j, TrainConfig& c) {
    reject_unknown(j,
                   {"lr", "beta1", "beta2", "batch", "epochs", "steps", "seed", "use_attention", "use_pcl", "use_rfl",
                    "use_gan", "lambda_G", "tv_operand", "conditioning", "hflip", "checkpoint_every",
                    "fixed_precision", "feature_layer", "extractor_weights"},
                   "train config");
    try {
        c.lr = j.value("lr", c.lr);
        c.beta1 = j.value("beta1", c.beta1);
        c.beta2 = j.value("beta2", c.beta2);
        c.batch = j.value("batch", c.batch);
        c.epochs = j.value("epochs", c.epochs);
        c.steps = j.value("steps", c.steps);
        c.seed = j.value("seed", c.seed);
        c.use_attention = j.value("use_attention", c.use_attention);
        c.use_pcl = j.value("use_pcl", c.use_pcl);
        c.use_rfl = j.value("use_rfl", c.use_rfl);
        c.use_gan = j.value("use_gan", c.use_gan);
        c.lambda_G = j.value("lambda_G", c.lambda_G);
        if (j.contains("tv_operand")) c.tv_operand = parse_tv_operand(j.at("tv_operand"));
        if (j.contains("conditioning")) c.conditioning = parse_conditioning(j.at("conditioning"));
        c.hflip = j.value("hflip", c.hflip);
        c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
        c.fixed_precision = j.value("fixed_precision", c.fixed_precision);
        c.feature_layer = j.value("feature_layer", c.feature_layer);
        c.extractor_weights = j.value("extractor_weights", c.extractor_weights);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("train config: ") + e.what());
    }
    c.validate();
}

void to_json(json& j, const RunConfig& c) {
    j = {{"network", c.network},           {"train", c.train},   {"train_manifest", c.train_manifest},
         {"val_manifest", c.val_manifest}, {"out_dir", c.out_dir}, {"resume", c.resume}};
}

void from_json(const json& j, RunConfig& c) {
    reject_unknown(j, {"network", "train", "train_manifest", "val_manifest", "out_dir", "resume"}, "run config");
    try {
        if (j.contains("network")) c.network = j.at("network").get<net::NetworkConfig>();
        if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
        c.train_manifest = j.value("train_manifest", c.train_manifest);
        c.val_manifest = j.value("val_manifest", c.val_manifest);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.resume = j.value("resume", c.resume);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("run config: ") + e.what());
    }
    if (c.train_manifest.empty()) throw ValidationError("run config: train_manifest is required");
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return j.get<RunConfig>();
}

std::uint64_t parameter_hash(const torch::nn::Module& module) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const torch::Tensor& t) {
        auto c = t.detach().contiguous();
        const auto* bytes = static_cast<const unsigned char*>(c.data_ptr());
        const std::size_t n = c.numel() * c.element_size();
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& p : module.parameters()) mix(p);
    for (const auto& b : module.buffers()) mix(b);
    return h;
}

void apply_precision_mode(bool fixed_precision) {
    if (fixed_precision) {
        torch::set_num_threads(1);
        at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/false);
    }
}

Trainer::Trainer(const net::NetworkConfig& network, const TrainConfig& config, std::vector<data::Sample> samples)
    : network_(network), config_(config), samples_(std::move(samples)) {
    config_.validate();
    network_.attention = config_.use_attention;
    network_.validate();
    if (samples_.empty()) throw ValidationError("train: no training samples");

    pattern_ = samples_.front().mosaic.pattern.name();
    patch_size_ = samples_.front().clean.height;
    const int64_t mult = network_.size_multiple();
    for (const auto& s : samples_) {
        if (s.mosaic.pattern.name() != pattern_) throw ValidationError("train: samples mix CFA patterns");
        if (s.clean.height != patch_size_ || s.clean.width != patch_size_) {
            throw ValidationError("train: samples must share one square patch size");
        }
        packed_.push_back(to_tensor(cfa::pack_input(s.mosaic)));
        clean_.push_back(to_tensor(s.clean));
    }
    if (patch_size_ % mult != 0) {
        throw ValidationError("train: patch size " + std::to_string(patch_size_) + " is not a multiple of " +
                              std::to_string(mult));
    }

    apply_precision_mode(config_.fixed_precision);
    torch::manual_seed(config_.seed);
    generator_ = net::Generator(network_);
    discriminator_ = net::Discriminator(network_);
    if (config_.use_rfl) {
        loss::FeatureExtractorSpec spec;
        spec.layer_id = config_.feature_layer;
        spec.weights_path = config_.extractor_weights;
        spec.init_seed = config_.seed + 1;
        extractor_ = loss::FeatureExtractor(spec);
    }
    const auto adam = [&](double lr) {
        return torch::optim::AdamOptions(lr).betas({config_.beta1, config_.beta2});
    };
    opt_g_ = std::make_unique<torch::optim::Adam>(generator_->parameters(), adam(config_.lr));
    opt_d_ = std::make_unique<torch::optim::Adam>(discriminator_->parameters(), adam(config_.lr));
    rng_.seed(config_.seed);
}

int64_t Trainer::total_steps() const {
    if (config_.steps > 0) return config_.steps;
    const auto n = static_cast<int64_t>(samples_.size());
    return config_.epochs * ((n + config_.batch - 1) / config_.batch);
}

std::uint64_t Trainer::extractor_hash() const { return extractor_ ? (*extractor_)->weights_hash() : 0; }

std::vector<std::size_t> Trainer::next_batch() {
    std::vector<std::size_t> out;
    for (int64_t i = 0; i < config_.batch; ++i) {
        if (cursor_ >= order_.size()) {
            order_.resize(samples_.size());
            std::iota(order_.begin(), order_.end(), 0);
            std::shuffle(order_.begin(), order_.end(), rng_);
            cursor_ = 0;
        }
        out.push_back(static_cast<std::size_t>(order_[cursor_++]));
    }
    return out;
}

std::pair<torch::Tensor, torch::Tensor> Trainer::assemble(const std::vector<std::size_t>& indices) {
    std::vector<torch::Tensor> inputs;
    std::vector<torch::Tensor> targets;
    for (const std::size_t idx : indices) {
        const bool flip = config_.hflip && (rng_() & 1U);
        if (!flip) {
            inputs.push_back(packed_[idx]);
            targets.push_back(clean_[idx]);
            continue;
        }
        // Mirroring moves the CFA phase, so the flipped patch is re-sampled and re-noised.
        const auto& s = samples_[idx];
        const RgbImage clean = flip_horizontal(s.clean);
        const cfa::NoiseSpec noise{s.record.sigma,
                                   s.record.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step_ + 1))};
        const auto mosaic = cfa::add_noise(cfa::mosaic(clean, s.mosaic.pattern), noise);
        inputs.push_back(to_tensor(cfa::pack_input(mosaic)));
        targets.push_back(to_tensor(clean));
    }
    return {torch::stack(inputs), torch::stack(targets)};
}

loss::LossReport Trainer::step() {
    const auto [input, target] = assemble(next_batch());
    generator_->train();
    discriminator_->train();

    const auto output = generator_->forward(input);
    const auto& condition = config_.conditioning == Conditioning::Reference ? target : input;
    const bool adversarial = config_.use_gan && config_.lambda_G > 0.0;

    torch::Tensor d_fake;
    if (adversarial) {
        set_requires_grad(*discriminator_, true);
        const auto d_real = discriminator_->forward(condition, target);
        const auto d_fake_detached = discriminator_->forward(condition, output.detach());
        auto d_loss = loss::discriminator_loss(d_real, d_fake_detached);
        opt_d_->zero_grad();
        d_loss.backward();
        opt_d_->step();
        set_requires_grad(*discriminator_, false);
        d_fake = discriminator_->forward(condition, output);
    }

    loss::TotalLossOptions opts;
    opts.weights.lambda_G = config_.lambda_G;
    opts.terms = {config_.use_pcl, config_.use_rfl, adversarial};
    opts.tv_operand = config_.tv_operand;
    auto total = loss::total_loss(target, output, d_fake, extractor_ ? &*extractor_ : nullptr, opts);
    if (!std::isfinite(total.report.L_T)) {
        std::ostringstream msg;
        msg << "non-finite total loss at step " << step_ + 1 << ": " << json(total.report).dump();
        throw TrainingDiverged(msg.str());
    }
    opt_g_->zero_grad();
    total.value.backward();
    opt_g_->step();
    ++step_;
    return total.report;
}

void Trainer::save_checkpoint(const fs::path& path) const {
    torch::serialize::OutputArchive archive;
    archive.write("network_config", c10::IValue(json(network_).dump()));
    archive.write("train_config", c10::IValue(json(config_).dump()));
    archive.write("pattern", c10::IValue(pattern_));
    archive.write("patch_size", c10::IValue(static_cast<int64_t>(patch_size_)));
    archive.write("generator", c10::IValue(net::parameter_map(*generator_)));
    archive.write("discriminator", c10::IValue(net::parameter_map(*discriminator_)));
    torch::serialize::OutputArchive opt_g;
    torch::serialize::OutputArchive opt_d;
    opt_g_->save(opt_g);
    opt_d_->save(opt_d);
    archive.write("optimizer_g", opt_g);
    archive.write("optimizer_d", opt_d);
    archive.write("step", c10::IValue(step_));
    std::ostringstream rng;
    rng << rng_;
    archive.write("rng", c10::IValue(rng.str()));
    archive.write("order", torch::tensor(std::vector<int64_t>(order_.begin(), order_.end()), torch::kInt64),
                  /*is_buffer=*/true);
    archive.write("cursor", c10::IValue(static_cast<int64_t>(cursor_)));

    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    archive.save_to(tmp.string());
    fs::rename(tmp, path);
}

void Trainer::load_checkpoint(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
    torch::serialize::InputArchive archive;
    archive.load_from(path.string());
    c10::IValue v;

    archive.read("network_config", v);
    if (json::parse(v.toStringRef()).get<net::NetworkConfig>() != network_) {
        throw ValidationError("checkpoint network config differs from the run config");
    }
    archive.read("train_config", v);
    if (resumable_view(json::parse(v.toStringRef()).get<TrainConfig>()) != resumable_view(config_)) {
        throw ValidationError("checkpoint train config differs from the run config");
    }
    archive.read("pattern", v);
    if (v.toStringRef() != pattern_) throw ValidationError("checkpoint was trained on a different CFA pattern");

    archive.read("generator", v);
    net::load_parameter_map(*generator_, dict_from_ivalue(v), "generator");
    archive.read("discriminator", v);
    net::load_parameter_map(*discriminator_, dict_from_ivalue(v), "discriminator");
    torch::serialize::InputArchive opt_g;
    torch::serialize::InputArchive opt_d;
    archive.read("optimizer_g", opt_g);
    archive.read("optimizer_d", opt_d);
    opt_g_->load(opt_g);
    opt_d_->load(opt_d);

    archive.read("step", v);
    step_ = v.toInt();
    archive.read("rng", v);
    std::istringstream rng(v.toStringRef());
    rng >> rng_;
    torch::Tensor order;
    archive.read("order", order, /*is_buffer=*/true);
    order_.assign(order.data_ptr<int64_t>(), order.data_ptr<int64_t>() + order.numel());
    archive.read("cursor", v);
    cursor_ = static_cast<std::size_t>(v.toInt());
}

TrainResult train(const RunConfig& config, std::optional<int64_t> max_steps) {
    const fs::path manifest_path(config.train_manifest);
    const auto manifest = data::read_manifest(manifest_path);
    auto samples = data::load_samples(manifest, manifest_path.parent_path());
    Trainer trainer(config.network, config.train, std::move(samples));

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);
    const fs::path checkpoint = out_dir / "checkpoint.pt";
    const fs::path log_path = out_dir / "log.jsonl";

    if (!config.resume.empty()) trainer.load_checkpoint(config.resume);
    std::ofstream log(log_path, config.resume.empty() ? std::ios::trunc : std::ios::app);
    if (!log) throw IoError("cannot write " + log_path.string());
    if (config.resume.empty()) {
        std::ostringstream hash;
        hash << std::hex << std::setw(16) << std::setfill('0') << trainer.extractor_hash();
        log << json{{"kind", "run"},
                    {"config", config},
                    {"generator_parameters", net::count_parameters(*trainer.generator())},
                    {"extractor_weights_hash", hash.str()}}
                   .dump()
            << '\n';
    }

    TrainResult result;
    result.checkpoint = checkpoint;
    const int64_t stop = std::min(trainer.total_steps(), max_steps.value_or(trainer.total_steps()));
    while (trainer.step_count() < stop) {
        const auto report = trainer.step();
        result.reports.push_back(report);
        json line = report;
        line["kind"] = "step";
        line["step"] = trainer.step_count();
        log << line.dump() << '\n';
        if (trainer.step_count() % config.train.checkpoint_every == 0) trainer.save_checkpoint(checkpoint);
    }
    log.flush();
    trainer.save_checkpoint(checkpoint);
    return result;
}

namespace {

std::vector<int> tile_positions(int size, int tile, int step) {
    std::vector<int> out;
    if (size <= tile) return {0};
    for (int p = 0; p + tile < size; p += step) out.push_back(p);
    out.push_back(size - tile);
    return out;
}

torch::Tensor ramp(int length, int overlap, bool rise, bool fall) {
    auto w = torch::ones({length}, torch::kFloat64);
    for (int i = 0; i < overlap && i < length; ++i) {
        const double v = (i + 1.0) / (overlap + 1.0);
        if (rise) w[i] = std::min(w[i].item<double>(), v);
        if (fall) w[length - 1 - i] = std::min(w[length - 1 - i].item<double>(), v);
    }
    return w;
}

}  // namespace

RgbImage reconstruct(net::Generator& generator, const cfa::MosaicImage& mosaic, int tile, int overlap) {
    torch::NoGradGuard no_grad;
    generator->eval();
    const auto dtype = generator->parameters().front().scalar_type();
    const int mult = static_cast<int>(generator->config().size_multiple());
    const int h = mosaic.plane.height;
    const int w = mosaic.plane.width;
    const int ph = (h + mult - 1) / mult * mult;
    const int pw = (w + mult - 1) / mult * mult;

    auto packed = to_tensor(cfa::pack_input(mosaic), dtype).unsqueeze(0);
    // Zero padding in the packed domain means "no samples".
    if (ph != h || pw != w) packed = torch::constant_pad_nd(packed, {0, pw - w, 0, ph - h}, 0.0);

    torch::Tensor out;
    if (tile <= 0 || (ph <= tile && pw <= tile)) {
        out = generator->forward(packed);
    } else {
        if (tile % mult != 0 || overlap < 0) {
            throw ValidationError("tile must be a multiple of " + std::to_string(mult) + " and overlap non-negative");
        }
        // Tiles this small cannot keep the requested overlap.
        if (overlap >= tile) overlap = tile / 2;
        overlap -= overlap % mult;
        const int step = tile - overlap;
        const int th = std::min(tile, ph);
        const int tw = std::min(tile, pw);
        auto acc = torch::zeros({1, 3, ph, pw}, torch::kFloat64);
        auto norm = torch::zeros({1, 1, ph, pw}, torch::kFloat64);
        for (int y : tile_positions(ph, th, step)) {
            for (int x : tile_positions(pw, tw, step)) {
                auto patch = packed.slice(2, y, y + th).slice(3, x, x + tw);
                auto pred = generator->forward(patch).to(torch::kFloat64);
                auto wy = ramp(th, overlap, y > 0, y + th < ph);
                auto wx = ramp(tw, overlap, x > 0, x + tw < pw);
                auto weight = torch::outer(wy, wx).view({1, 1, th, tw});
                acc.slice(2, y, y + th).slice(3, x, x + tw).add_(pred * weight);
                norm.slice(2, y, y + th).slice(3, x, x + tw).add_(weight);
            }
        }
        out = acc / norm;
    }
    return from_tensor(out.slice(2, 0, h).slice(3, 0, w));
}

InferenceCheckpoint load_for_inference(const fs::path& checkpoint) {
    InferenceCheckpoint out;
    out.generator = net::load_generator(checkpoint);
    torch::serialize::InputArchive archive;
    archive.load_from(checkpoint.string());
    c10::IValue v;
    if (archive.try_read("pattern", v)) out.pattern = v.toStringRef();
    if (archive.try_read("patch_size", v)) out.patch_size = static_cast<int>(v.toInt());
    return out;
}

std::vector<fs::path> infer(const fs::path& checkpoint, const std::vector<fs::path>& mosaics, const fs::path& out_dir,
                            const TileOptions& opts) {
    auto model = load_for_inference(checkpoint);
    const int tile = opts.tile > 0 ? opts.tile : model.patch_size;
    std::optional<cfa::CfaPattern> fallback;
    if (!model.pattern.empty()) fallback = cfa::CfaPattern::parse(model.pattern);

    std::vector<fs::path> written;
    for (const auto& path : mosaics) {
        const auto mosaic = io::read_mosaic(path, fallback ? &*fallback : nullptr);
        if (!model.pattern.empty() && mosaic.pattern.name() != model.pattern) {
            throw ValidationError(path.string() + ": mosaic pattern '" + mosaic.pattern.name() +
                                  "' does not match the checkpoint's '" + model.pattern + "'");
        }
        const auto image = reconstruct(model.generator, mosaic, tile, opts.overlap);
        const fs::path out = out_dir / (path.stem().string() + ".png");
        io::write_rgb(out, image, 16);
        written.push_back(out);
    }
    return written;
}

std::vector<std::string> ablation_variants() { return {"Base", "+AM", "+AM+PCL", "+AM+PCL+RFL"}; }

std::vector<AblationCell> ablation_matrix(const std::vector<data::Sample>& train_samples,
                                          const std::vector<data::Sample>& val_samples,
                                          const net::NetworkConfig& base_network, const TrainConfig& base_train,
                                          const std::vector<int64_t>& densities) {
    std::vector<AblationCell> cells;
    const auto variants = ablation_variants();
    for (std::size_t v = 0; v < variants.size(); ++v) {
        for (const int64_t gd : densities) {
            AblationCell cell;
            cell.variant = variants[v];
            cell.group_density = gd;
            try {
                TrainConfig cfg = base_train;
                cfg.use_attention = v >= 1;
                cfg.use_pcl = v >= 2;
                cfg.use_rfl = v >= 3;
                net::NetworkConfig network = base_network;
                network.group_density = gd;

                Trainer trainer(network, cfg, train_samples);
                cell.parameters = net::count_parameters(*trainer.generator());
                loss::LossReport last;
                while (trainer.step_count() < trainer.total_steps()) last = trainer.step();
                cell.final_loss = last.L_T;

                const auto& eval_set = val_samples.empty() ? train_samples : val_samples;
                std::vector<metrics::NamedImage> outputs;
                std::vector<metrics::NamedImage> refs;
                for (const auto& s : eval_set) {
                    const std::string name = std::to_string(s.record.id);
                    outputs.push_back({name, reconstruct(trainer.generator(), s.mosaic, 0, 16)});
                    refs.push_back({name, s.clean});
                }
                const auto report = metrics::evaluate_dataset(outputs, refs);
                cell.psnr = report.mean_psnr;
                cell.ssim = report.mean_ssim;
                cell.delta_e = report.mean_delta_e;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

std::string format_ablation_table(const std::vector<AblationCell>& cells) {
    std::ostringstream out;
    out << std::left << std::setw(14) << "variant" << std::setw(5) << "GD" << std::setw(12) << "params"
        << "PSNR/SSIM/DeltaE\n";
    for (const auto& c : cells) {
        out << std::left << std::setw(14) << c.variant << std::setw(5) << c.group_density << std::setw(12)
            << c.parameters;
        if (!c.error.empty()) {
            out << "-- (" << c.error << ")\n";
            continue;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.2f/%.4f/%.2f\n", c.psnr, c.ssim, c.delta_e);
        out << buf;
    }
    return out.str();
}

}  // namespace jdd::train
