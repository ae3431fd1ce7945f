#include "jdd/losses.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>

#include "jdd/color_torch.hpp"
#include "jdd/image.hpp"
#include "jdd/network.hpp"

namespace jdd::loss {
namespace fs = std::filesystem;

std::vector<ExtractorLayer> vgg19_plan() {
    const std::vector<std::vector<int64_t>> blocks{{64, 64}, {128, 128}, {256, 256, 256, 256},
                                                   {512, 512, 512, 512}, {512, 512, 512, 512}};
    std::vector<ExtractorLayer> plan;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            plan.push_back({ExtractorLayer::Kind::Conv, blocks[b][i],
                            "relu" + std::to_string(b + 1) + "_" + std::to_string(i + 1)});
        }
        plan.push_back({ExtractorLayer::Kind::Pool, 0, "pool" + std::to_string(b + 1)});
    }
    return plan;
}

fs::path resolve_weights_path(const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || fs::exists(p)) return p;
    if (const char* cache = std::getenv("JDD_CACHE"); cache && *cache) return fs::path(cache) / p;
    return p;
}

namespace {

std::uint64_t fnv1a_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace

FeatureExtractorImpl::FeatureExtractorImpl(const FeatureExtractorSpec& spec) : spec_(spec) {
    const auto plan = spec_.plan.empty() ? vgg19_plan() : spec_.plan;
    trunk = torch::nn::Sequential();
    int64_t in = 3;
    bool found = false;
    for (const auto& layer : plan) {
        if (layer.kind == ExtractorLayer::Kind::Conv) {
            trunk->push_back(torch::nn::Conv2d(torch::nn::Conv2dOptions(in, layer.out_channels, 3).padding(1)));
            trunk->push_back(torch::nn::ReLU());
            in = layer.out_channels;
        } else {
            trunk->push_back(torch::nn::MaxPool2d(torch::nn::MaxPool2dOptions(2).stride(2)));
        }
        if (layer.name == spec_.layer_id) {
            found = true;
            break;
        }
    }
    if (!found) throw ValidationError("feature extractor: unknown layer '" + spec_.layer_id + "'");
    register_module("trunk", trunk);

    if (!spec_.weights_path.empty()) {
        const fs::path path = resolve_weights_path(spec_.weights_path);
        if (!fs::exists(path)) throw IoError("feature extractor weights not found: " + path.string());
        torch::serialize::InputArchive archive;
        archive.load_from(path.string());
        c10::IValue v;
        archive.read("extractor", v);
        // The file may hold a deeper trunk than we evaluate; keep only our layers.
        std::set<std::string> own;
        for (const auto& item : named_parameters()) own.insert(item.key());
        c10::Dict<std::string, at::Tensor> params;
        for (const auto& e : v.toGenericDict()) {
            if (own.contains(e.key().toStringRef())) params.insert(e.key().toStringRef(), e.value().toTensor());
        }
        net::load_parameter_map(*this, params, "feature extractor");
        weights_hash_ = fnv1a_file(path);
    } else {
        torch::manual_seed(spec_.init_seed);
        torch::NoGradGuard no_grad;
        for (auto& m : trunk->modules(/*include_self=*/false)) {
            if (auto* c = m->as<torch::nn::Conv2d>()) {
                torch::nn::init::kaiming_normal_(c->weight, 0.0, torch::kFanIn, torch::kReLU);
                c->bias.zero_();
            }
        }
    }
    for (auto& p : parameters()) p.set_requires_grad(false);
    eval();
}

torch::Tensor FeatureExtractorImpl::forward(const torch::Tensor& x) {
    auto opts = x.options();
    auto mean = torch::tensor({0.485, 0.456, 0.406}, opts).view({1, 3, 1, 1});
    auto stdv = torch::tensor({0.229, 0.224, 0.225}, opts).view({1, 3, 1, 1});
    return trunk->forward((x - mean) / stdv);
}

void FeatureExtractorImpl::save(const fs::path& path) const {
    torch::serialize::OutputArchive archive;
    archive.write("extractor", c10::IValue(net::parameter_map(*this)));
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    archive.save_to(path.string());
}

void to_json(nlohmann::json& j, const LossReport& r) {
    j = {{"L_R", r.L_R},     {"L_RFL", r.L_RFL},       {"L_PCL", r.L_PCL},
         {"L_G", r.L_G},     {"lambda_R", r.lambda_R}, {"L_T", r.L_T}};
}

torch::Tensor reconstruction_loss(const torch::Tensor& reference, const torch::Tensor& output) {
    if (reference.sizes() != output.sizes()) throw ValidationError("reconstruction_loss: dimension mismatch");
    return (reference - output).abs().mean();
}

torch::Tensor feature_loss(const torch::Tensor& reference, const torch::Tensor& output, FeatureExtractor& extractor) {
    if (reference.sizes() != output.sizes()) throw ValidationError("feature_loss: dimension mismatch");
    torch::Tensor ref_feat;
    {
        torch::NoGradGuard no_grad;
        ref_feat = extractor->forward(reference);
    }
    return (ref_feat - extractor->forward(output)).abs().mean();
}

torch::Tensor tv_regulator(const torch::Tensor& image, int64_t feat_h, int64_t feat_w, int64_t feat_c) {
    torch::NoGradGuard no_grad;
    auto img = image.detach();
    const int64_t n = img.size(0);
    auto dv = (img.slice(2, 1) - img.slice(2, 0, -1)).abs().sum();
    auto dh = (img.slice(3, 1) - img.slice(3, 0, -1)).abs().sum();
    return (dv + dh) / static_cast<double>(n * feat_h * feat_w * feat_c);
}

RflParts regularized_feature_loss(const torch::Tensor& reference, const torch::Tensor& output,
                                  FeatureExtractor& extractor, TvOperand operand) {
    if (reference.sizes() != output.sizes()) throw ValidationError("regularized_feature_loss: dimension mismatch");
    torch::Tensor ref_feat;
    {
        torch::NoGradGuard no_grad;
        ref_feat = extractor->forward(reference);
    }
    auto out_feat = extractor->forward(output);
    auto feature = (ref_feat - out_feat).abs().mean();
    auto lambda =
        tv_regulator(operand == TvOperand::Output ? output : reference, out_feat.size(2), out_feat.size(3),
                     out_feat.size(1));
    return {lambda * feature, lambda, feature};
}

torch::Tensor perceptual_colour_loss(const torch::Tensor& reference, const torch::Tensor& output) {
    if (reference.sizes() != output.sizes()) throw ValidationError("perceptual_colour_loss: dimension mismatch");
    return color::ciede2000(color::srgb_to_lab(reference), color::srgb_to_lab(output)).mean();
}

torch::Tensor generator_adversarial_loss(const torch::Tensor& d_fake) {
    return -torch::log(d_fake.clamp_min(kProbEps)).mean();
}

torch::Tensor discriminator_loss(const torch::Tensor& d_real, const torch::Tensor& d_fake) {
    auto real = torch::log(d_real.clamp_min(kProbEps));
    auto fake = torch::log((1.0 - d_fake).clamp_min(kProbEps));
    return -(real + fake).mean();
}

TotalLoss total_loss(const torch::Tensor& reference, const torch::Tensor& output, const torch::Tensor& d_fake,
                     FeatureExtractor* extractor, const TotalLossOptions& opts) {
    if (opts.weights.lambda_G < 0.0) throw ValidationError("lambda_G must be non-negative");
    TotalLoss out;
    auto total = reconstruction_loss(reference, output);
    out.report.L_R = total.item<double>();

    if (opts.terms.rfl) {
        if (extractor == nullptr) throw ValidationError("total_loss: RFL enabled without a feature extractor");
        auto rfl = regularized_feature_loss(reference, output, *extractor, opts.tv_operand);
        total = total + rfl.value;
        out.report.L_RFL = rfl.value.item<double>();
        out.report.lambda_R = rfl.lambda_R.item<double>();
    }
    if (opts.terms.pcl) {
        auto pcl = perceptual_colour_loss(reference, output);
        total = total + pcl;
        out.report.L_PCL = pcl.item<double>();
    }
    if (opts.terms.gan && d_fake.defined()) {
        auto lg = generator_adversarial_loss(d_fake);
        total = total + opts.weights.lambda_G * lg;
        out.report.L_G = lg.item<double>();
    }
    out.value = total;
    out.report.L_T = out.report.L_R + out.report.L_RFL + out.report.L_PCL + opts.weights.lambda_G * out.report.L_G;
    return out;
}

}  // namespace jdd::loss
