#include "jdd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "jdd/color.hpp"

namespace jdd::metrics {
namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(size);
    const double centre = 0.5 * (size - 1);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - centre;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Valid-mode separable filtering of one channel of `f(x, y)` values.
template <typename Fn>
std::vector<double> filter_valid(int h, int w, const std::vector<double>& k, Fn&& value) {
    const int n = static_cast<int>(k.size());
    const int oh = h - n + 1;
    const int ow = w - n + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += k[i] * value(y, x + i);
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

nlohmann::json psnr_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

double psnr(const RgbImage& reference, const RgbImage& candidate) {
    require_same_shape(reference, candidate, "psnr");
    double sse = 0.0;
    for (std::size_t i = 0; i < reference.data.size(); ++i) {
        const double d = reference.data[i] - candidate.data[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(reference.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const RgbImage& reference, const RgbImage& candidate, const SsimOptions& opts) {
    require_same_shape(reference, candidate, "ssim");
    if (reference.height < opts.window || reference.width < opts.window) {
        throw ValidationError("ssim: image smaller than the " + std::to_string(opts.window) + "x" +
                              std::to_string(opts.window) + " window");
    }
    const auto k = gaussian_kernel(opts.window, opts.gaussian_sigma);
    const double c1 = std::pow(opts.k1 * opts.dynamic_range, 2.0);
    const double c2 = std::pow(opts.k2 * opts.dynamic_range, 2.0);
    const int h = reference.height;
    const int w = reference.width;

    double total = 0.0;
    std::size_t count = 0;
    for (int c = 0; c < 3; ++c) {
        auto x = [&](int yy, int xx) { return reference.at(yy, xx, c); };
        auto y = [&](int yy, int xx) { return candidate.at(yy, xx, c); };
        const auto mu_x = filter_valid(h, w, k, x);
        const auto mu_y = filter_valid(h, w, k, y);
        const auto xx = filter_valid(h, w, k, [&](int a, int b) { return x(a, b) * x(a, b); });
        const auto yy = filter_valid(h, w, k, [&](int a, int b) { return y(a, b) * y(a, b); });
        const auto xy = filter_valid(h, w, k, [&](int a, int b) { return x(a, b) * y(a, b); });
        for (std::size_t i = 0; i < mu_x.size(); ++i) {
            const double mx = mu_x[i];
            const double my = mu_y[i];
            const double vx = xx[i] - mx * mx;
            const double vy = yy[i] - my * my;
            const double cov = xy[i] - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
        count += mu_x.size();
    }
    return total / static_cast<double>(count);
}

RgbImage quantize_8bit(const RgbImage& image) {
    RgbImage out = image;
    for (double& v : out.data) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
    return out;
}

std::uint64_t pairing_checksum(const std::vector<std::string>& candidate_names,
                               const std::vector<std::string>& reference_names) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (std::size_t i = 0; i < candidate_names.size() && i < reference_names.size(); ++i) {
        mix(candidate_names[i]);
        mix(reference_names[i]);
    }
    return h;
}

MetricReport evaluate_dataset(const std::vector<NamedImage>& candidates,
                              const std::vector<NamedImage>& references, const EvalOptions& opts) {
    if (candidates.size() != references.size()) {
        throw ValidationError("evaluate_dataset: " + std::to_string(candidates.size()) + " outputs vs " +
                              std::to_string(references.size()) + " references");
    }
    if (candidates.empty()) throw ValidationError("evaluate_dataset: empty dataset");

    MetricReport report;
    std::vector<std::string> cand_names;
    std::vector<std::string> ref_names;
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        RgbImage cand = candidates[i].image;
        RgbImage ref = references[i].image;
        if (opts.quantize_8bit) {
            cand = quantize_8bit(cand);
            ref = quantize_8bit(ref);
        }
        ImageMetrics m;
        m.name = candidates[i].name;
        m.reference_name = references[i].name;
        m.psnr = psnr(ref, cand);
        m.ssim = ssim(ref, cand);
        m.delta_e = color::delta_e_map(ref, cand).mean;
        report.images.push_back(m);
        cand_names.push_back(m.name);
        ref_names.push_back(m.reference_name);
        if (m.name != m.reference_name) ++mismatched;
    }

    const double n = static_cast<double>(report.images.size());
    for (const auto& m : report.images) {
        report.mean_psnr += m.psnr;
        report.mean_ssim += m.ssim;
        report.mean_delta_e += m.delta_e;
    }
    report.mean_psnr /= n;
    report.mean_ssim /= n;
    report.mean_delta_e /= n;

    report.pairing_checksum = pairing_checksum(cand_names, ref_names);
    if (mismatched > 0) {
        report.warnings.push_back(std::to_string(mismatched) + " output/reference pairs have different names");
    }
    if (opts.expected_checksum != 0 && opts.expected_checksum != report.pairing_checksum) {
        report.warnings.push_back("pairing checksum mismatch: the output/reference order differs from the expected pairing");
    }
    return report;
}

void write_report_jsonl(std::ostream& out, const MetricReport& report, const std::string& dataset,
                        double sigma) {
    for (const auto& m : report.images) {
        nlohmann::json rec = {{"kind", "image"},     {"name", m.name},       {"reference", m.reference_name},
                              {"dataset", dataset},  {"sigma", sigma},       {"psnr", psnr_json(m.psnr)},
                              {"ssim", m.ssim},      {"delta_e", m.delta_e}};
        out << rec.dump() << '\n';
    }
    nlohmann::json summary = {{"kind", "summary"},
                              {"dataset", dataset},
                              {"sigma", sigma},
                              {"count", report.images.size()},
                              {"psnr", psnr_json(report.mean_psnr)},
                              {"ssim", report.mean_ssim},
                              {"delta_e", report.mean_delta_e},
                              {"pairing_checksum", report.pairing_checksum},
                              {"warnings", report.warnings}};
    out << summary.dump() << '\n';
}

}  // namespace jdd::metrics
