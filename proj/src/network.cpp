#include "jdd/network.hpp"

#include <set>

#include "jdd/image.hpp"

namespace jdd::net {
namespace F = torch::nn::functional;
namespace fs = std::filesystem;

namespace {

torch::nn::Conv2d conv(int64_t in, int64_t out, int64_t kernel, int64_t stride = 1, bool bias = true,
                       int64_t groups = 1) {
    return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, kernel)
                                 .stride(stride)
                                 .padding(kernel / 2)
                                 .bias(bias)
                                 .groups(groups));
}

}  // namespace

void NetworkConfig::validate() const {
    if (depths.empty()) throw ValidationError("network: depths must not be empty");
    if (group_density < 1) throw ValidationError("network: group_density must be >= 1");
    if (reduction < 1) throw ValidationError("network: reduction must be >= 1");
    if (bottleneck_expansion < 1) throw ValidationError("network: bottleneck_expansion must be >= 1");
    if (disc_layers < 1 || disc_base_width < 1) throw ValidationError("network: discriminator layout must be positive");
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (depths[i] < 1) throw ValidationError("network: depths must be positive");
        if (depths[i] % reduction != 0) {
            throw ValidationError("network: depth " + std::to_string(depths[i]) +
                                  " is not divisible by reduction " + std::to_string(reduction));
        }
        if (i > 0 && depths[i] <= depths[i - 1]) throw ValidationError("network: depths must be strictly increasing");
    }
}

void to_json(nlohmann::json& j, const NetworkConfig& cfg) {
    j = {{"depths", cfg.depths},
         {"group_density", cfg.group_density},
         {"reduction", cfg.reduction},
         {"bottleneck_expansion", cfg.bottleneck_expansion},
         {"leaky_slope", cfg.leaky_slope},
         {"disc_layers", cfg.disc_layers},
         {"disc_base_width", cfg.disc_base_width},
         {"attention", cfg.attention}};
}

void from_json(const nlohmann::json& j, NetworkConfig& cfg) {
    static const std::set<std::string> known{"depths",      "group_density", "reduction",       "bottleneck_expansion",
                                             "leaky_slope", "disc_layers",   "disc_base_width", "attention"};
    if (!j.is_object()) throw ValidationError("network config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ValidationError("network config: unknown key '" + key + "'");
    }
    try {
        if (j.contains("depths")) cfg.depths = j.at("depths").get<std::vector<int64_t>>();
        if (j.contains("group_density")) cfg.group_density = j.at("group_density").get<int64_t>();
        if (j.contains("reduction")) cfg.reduction = j.at("reduction").get<int64_t>();
        if (j.contains("bottleneck_expansion")) cfg.bottleneck_expansion = j.at("bottleneck_expansion").get<int64_t>();
        if (j.contains("leaky_slope")) cfg.leaky_slope = j.at("leaky_slope").get<double>();
        if (j.contains("disc_layers")) cfg.disc_layers = j.at("disc_layers").get<int64_t>();
        if (j.contains("disc_base_width")) cfg.disc_base_width = j.at("disc_base_width").get<int64_t>();
        if (j.contains("attention")) cfg.attention = j.at("attention").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("network config: ") + e.what());
    }
    cfg.validate();
}

DepthAttentionImpl::DepthAttentionImpl(int64_t channels, int64_t reduction) {
    if (channels % reduction != 0) {
        throw ValidationError("depth attention: " + std::to_string(channels) + " channels not divisible by " +
                              std::to_string(reduction));
    }
    squeeze = register_module("squeeze", conv(channels, channels / reduction, 1));
    expand = register_module("expand", conv(channels / reduction, channels, 1));
    // With few hidden units all of them can start below zero and never recover.
    torch::NoGradGuard no_grad;
    squeeze->bias.fill_(kSqueezeBiasInit);
}

torch::Tensor DepthAttentionImpl::gate(const torch::Tensor& x) {
    auto z = x.mean({2, 3}, /*keepdim=*/true);
    return torch::sigmoid(expand(torch::relu(squeeze(z))));
}

torch::Tensor DepthAttentionImpl::forward(const torch::Tensor& x) { return x * gate(x); }

SpatialAttentionImpl::SpatialAttentionImpl() { conv = register_module("conv", jdd::net::conv(2, 1, 3)); }

torch::Tensor SpatialAttentionImpl::attention_map(const torch::Tensor& x) {
    auto avg = x.mean(1, /*keepdim=*/true);
    auto mx = x.amax(1, /*keepdim=*/true);
    return torch::sigmoid(conv(torch::cat({avg, mx}, 1)));
}

torch::Tensor SpatialAttentionImpl::forward(const torch::Tensor& x) { return x * attention_map(x); }

BottleneckImpl::BottleneckImpl(int64_t channels, int64_t expansion, double leaky_slope) : slope(leaky_slope) {
    const int64_t hidden = channels * expansion;
    expand = register_module("expand", conv(channels, hidden, 1));
    depthwise = register_module("depthwise", conv(hidden, hidden, 3, 1, true, hidden));
    project = register_module("project", conv(hidden, channels, 1));
}

torch::Tensor BottleneckImpl::forward(const torch::Tensor& x) {
    const auto act = F::LeakyReLUFuncOptions().negative_slope(slope);
    auto h = F::leaky_relu(expand(x), act);
    h = F::leaky_relu(depthwise(h), act);
    return project(h);
}

DabImpl::DabImpl(int64_t channels, const NetworkConfig& cfg) {
    bottleneck = register_module("bottleneck", Bottleneck(channels, cfg.bottleneck_expansion, cfg.leaky_slope));
    if (cfg.attention) attention = register_module("attention", DepthAttention(channels, cfg.reduction));
}

torch::Tensor DabImpl::forward(const torch::Tensor& x) {
    auto out = bottleneck(x);
    if (attention) out = out + attention(x);
    return out;
}

GdabImpl::GdabImpl(int64_t channels, const NetworkConfig& cfg) {
    skip = register_module("skip", conv(channels, channels, 1, 1, /*bias=*/false));
    chain = torch::nn::Sequential();
    for (int64_t i = 0; i < cfg.group_density; ++i) chain->push_back(Dab(channels, cfg));
    register_module("chain", chain);
}

torch::Tensor GdabImpl::forward(const torch::Tensor& x) { return skip(x) + chain->forward(x); }

DownsampleImpl::DownsampleImpl(int64_t in_channels, int64_t out_channels) {
    conv = register_module("conv", jdd::net::conv(in_channels, out_channels, 3, 2));
}

torch::Tensor DownsampleImpl::forward(const torch::Tensor& x) {
    if (x.size(2) % 2 != 0 || x.size(3) % 2 != 0) {
        throw ValidationError("downsample: odd spatial size " + std::to_string(x.size(2)) + "x" +
                              std::to_string(x.size(3)));
    }
    return conv(x);
}

UpsampleImpl::UpsampleImpl(int64_t in_channels, int64_t out_channels) {
    conv = register_module("conv", jdd::net::conv(in_channels, 4 * out_channels, 3));
    act = register_module("act", torch::nn::PReLU(torch::nn::PReLUOptions().num_parameters(out_channels)));
}

torch::Tensor UpsampleImpl::forward(const torch::Tensor& x) { return act(depth_to_space(conv(x), 2)); }

EncoderStageImpl::EncoderStageImpl(int64_t channels, int64_t next_channels, const NetworkConfig& cfg) {
    gdab = register_module("gdab", Gdab(channels, cfg));
    if (cfg.attention) attention = register_module("attention", SpatialAttention());
    down = register_module("down", Downsample(channels, next_channels));
}

std::pair<torch::Tensor, torch::Tensor> EncoderStageImpl::forward(const torch::Tensor& x) {
    auto f = gdab(x);
    if (attention) f = attention(f);
    return {f, down(f)};
}

DecoderStageImpl::DecoderStageImpl(int64_t channels, int64_t deeper_channels, const NetworkConfig& cfg) {
    up = register_module("up", Upsample(deeper_channels, channels));
    fuse = register_module("fuse", conv(2 * channels, channels, 1));
    gdab = register_module("gdab", Gdab(channels, cfg));
}

torch::Tensor DecoderStageImpl::forward(const torch::Tensor& deeper, const torch::Tensor& skip) {
    return gdab(fuse(torch::cat({up(deeper), skip}, 1)));
}

GeneratorImpl::GeneratorImpl(const NetworkConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto& d = cfg_.depths;
    stem = register_module("stem", conv(3, d.front(), 3));
    encoder = torch::nn::ModuleList();
    decoder = torch::nn::ModuleList();
    for (std::size_t i = 0; i + 1 < d.size(); ++i) encoder->push_back(EncoderStage(d[i], d[i + 1], cfg_));
    bottom = Gdab(d.back(), cfg_);
    // decoder[i] brings depth i+1 back to depth i
    for (std::size_t i = 0; i + 1 < d.size(); ++i) decoder->push_back(DecoderStage(d[i], d[i + 1], cfg_));
    register_module("encoder", encoder);
    register_module("bottom", bottom);
    register_module("decoder", decoder);
    head = register_module("head", conv(d.front(), 3, 3));
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& packed) {
    const int64_t mult = cfg_.size_multiple();
    if (packed.dim() != 4 || packed.size(1) != 3) throw ValidationError("generator: expected (N,3,H,W) input");
    if (packed.size(2) % mult != 0 || packed.size(3) % mult != 0) {
        throw ValidationError("generator: spatial size " + std::to_string(packed.size(2)) + "x" +
                              std::to_string(packed.size(3)) + " is not a multiple of " + std::to_string(mult));
    }
    std::vector<torch::Tensor> skips;
    auto x = stem(packed);
    for (const auto& stage : *encoder) {
        auto [skip, down] = stage->as<EncoderStage>()->forward(x);
        skips.push_back(skip);
        x = down;
    }
    x = bottom(x);
    for (std::size_t i = decoder->size(); i-- > 0;) {
        x = decoder[i]->as<DecoderStage>()->forward(x, skips[i]);
    }
    return torch::sigmoid(head(x));
}

DiscriminatorImpl::DiscriminatorImpl(const NetworkConfig& cfg) {
    body = torch::nn::Sequential();
    int64_t in = 6;
    int64_t width = cfg.disc_base_width;
    for (int64_t layer = 1; layer <= cfg.disc_layers; ++layer) {
        const bool odd = layer % 2 == 1;
        int64_t out = width;
        if (odd && layer > 1) out = width * 2;
        body->push_back(conv(in, out, 3, odd ? 2 : 1));
        body->push_back(torch::nn::SiLU());
        if (odd) ++halvings_;
        in = out;
        width = out;
    }
    register_module("body", body);
    classifier = register_module("classifier", torch::nn::Linear(in, 1));
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& reference, const torch::Tensor& candidate) {
    if (reference.sizes() != candidate.sizes()) throw ValidationError("discriminator: pair dimension mismatch");
    auto h = body->forward(torch::cat({reference, candidate}, 1));
    h = h.mean({2, 3});
    return torch::sigmoid(classifier(h)).squeeze(1);
}

int64_t count_parameters(const torch::nn::Module& module) {
    int64_t n = 0;
    for (const auto& p : module.parameters()) n += p.numel();
    return n;
}

torch::Tensor depth_to_space(const torch::Tensor& x, int64_t factor) { return F::pixel_shuffle(x, factor); }

torch::Tensor space_to_depth(const torch::Tensor& x, int64_t factor) { return F::pixel_unshuffle(x, factor); }

c10::Dict<std::string, at::Tensor> parameter_map(const torch::nn::Module& module) {
    c10::Dict<std::string, at::Tensor> out;
    for (const auto& item : module.named_parameters()) out.insert(item.key(), item.value().detach().clone());
    for (const auto& item : module.named_buffers()) out.insert(item.key(), item.value().detach().clone());
    return out;
}

void load_parameter_map(torch::nn::Module& module, const c10::Dict<std::string, at::Tensor>& stored,
                        const std::string& what) {
    std::map<std::string, torch::Tensor> own;
    for (const auto& item : module.named_parameters()) own.emplace(item.key(), item.value());
    for (const auto& item : module.named_buffers()) own.emplace(item.key(), item.value());

    if (own.size() != stored.size()) {
        throw ValidationError(what + ": checkpoint holds " + std::to_string(stored.size()) + " tensors, model has " +
                              std::to_string(own.size()));
    }
    for (const auto& entry : stored) {
        const std::string& key = entry.key();
        auto it = own.find(key);
        if (it == own.end()) throw ValidationError(what + ": unexpected tensor '" + key + "' in checkpoint");
        if (it->second.sizes() != entry.value().sizes()) {
            throw ValidationError(what + ": shape mismatch for '" + key + "'");
        }
    }
    torch::NoGradGuard no_grad;
    for (const auto& entry : stored) {
        auto& dst = own.at(entry.key());
        dst.copy_(entry.value().to(dst.dtype()));
    }
}

void save_generator(const fs::path& path, const Generator& generator) {
    torch::serialize::OutputArchive archive;
    archive.write("network_config", c10::IValue(nlohmann::json(generator->config()).dump()));
    archive.write("generator", c10::IValue(parameter_map(*generator)));
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    archive.save_to(tmp.string());
    fs::rename(tmp, path);
}

namespace {

torch::serialize::InputArchive open_archive(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("checkpoint not found: " + path.string());
    torch::serialize::InputArchive archive;
    try {
        archive.load_from(path.string());
    } catch (const c10::Error& e) {
        throw IoError("cannot read checkpoint " + path.string());
    }
    return archive;
}

NetworkConfig config_from_archive(torch::serialize::InputArchive& archive) {
    c10::IValue v;
    archive.read("network_config", v);
    return nlohmann::json::parse(v.toStringRef()).get<NetworkConfig>();
}

}  // namespace

NetworkConfig read_network_config(const fs::path& path) {
    auto archive = open_archive(path);
    return config_from_archive(archive);
}

Generator load_generator(const fs::path& path) {
    auto archive = open_archive(path);
    Generator g(config_from_archive(archive));
    c10::IValue v;
    archive.read("generator", v);
    c10::Dict<std::string, at::Tensor> params;
    for (const auto& e : v.toGenericDict()) params.insert(e.key().toStringRef(), e.value().toTensor());
    load_parameter_map(*g, params, "generator");
    return g;
}

}  // namespace jdd::net
