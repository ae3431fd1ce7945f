#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "jdd/image.hpp"

namespace jdd::metrics {

/// PSNR on [0,1] data; +infinity when the images are identical.
double psnr(const RgbImage& reference, const RgbImage& candidate);

struct SsimOptions {
    int window = 11;
    double gaussian_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Single-scale SSIM, averaged over valid window positions and channels.
double ssim(const RgbImage& reference, const RgbImage& candidate, const SsimOptions& opts = {});

/// Rounds every value to the nearest of 256 levels (for parity with 8-bit
/// evaluations of prior work).
RgbImage quantize_8bit(const RgbImage& image);

struct ImageMetrics {
    std::string name;
    std::string reference_name;
    double psnr = 0.0;
    double ssim = 0.0;
    double delta_e = 0.0;
};

struct MetricReport {
    std::vector<ImageMetrics> images;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double mean_delta_e = 0.0;
    /// FNV-1a over the ordered (candidate, reference) names.
    std::uint64_t pairing_checksum = 0;
    std::vector<std::string> warnings;
};

struct NamedImage {
    std::string name;
    RgbImage image;
};

struct EvalOptions {
    bool quantize_8bit = false;
    /// When nonzero, compared against the computed pairing checksum.
    std::uint64_t expected_checksum = 0;
};

/// Scores candidate[i] against reference[i]. Pairs whose names differ are
/// reported in `warnings`, as is a checksum that disagrees with
/// `expected_checksum`.
MetricReport evaluate_dataset(const std::vector<NamedImage>& candidates,
                              const std::vector<NamedImage>& references, const EvalOptions& opts = {});

std::uint64_t pairing_checksum(const std::vector<std::string>& candidate_names,
                               const std::vector<std::string>& reference_names);

/// One JSON object per image followed by a summary record; `dataset` and
/// `sigma` are copied into every record. Infinite PSNR is written as "inf".
void write_report_jsonl(std::ostream& out, const MetricReport& report, const std::string& dataset,
                        double sigma);

}  // namespace jdd::metrics
