#include "jdd/cfa.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace jdd {

RgbImage crop(const RgbImage& image, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || y0 + h > image.height || x0 + w > image.width) {
        throw ValidationError("crop window out of bounds");
    }
    RgbImage out(h, w);
    for (int y = 0; y < h; ++y) {
        const double* src = &image.data[(static_cast<std::size_t>(y0 + y) * image.width + x0) * 3];
        std::copy(src, src + static_cast<std::size_t>(w) * 3, &out.data[static_cast<std::size_t>(y) * w * 3]);
    }
    return out;
}

RgbImage flip_horizontal(const RgbImage& image) {
    RgbImage out(image.height, image.width);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = image.at(y, image.width - 1 - x, c);
        }
    }
    return out;
}

}  // namespace jdd

namespace jdd::cfa {

CfaPattern CfaPattern::bayer() {
    return CfaPattern(PatternKind::BayerRggb, 2,
                      {{{R, G, R, G}, {G, B, G, B}, {R, G, R, G}, {G, B, G, B}}});
}

CfaPattern CfaPattern::quad_bayer() {
    return CfaPattern(PatternKind::QuadBayer, 4,
                      {{{R, R, G, G}, {R, R, G, G}, {G, G, B, B}, {G, G, B, B}}});
}

CfaPattern CfaPattern::from_kind(PatternKind kind) {
    return kind == PatternKind::QuadBayer ? quad_bayer() : bayer();
}

CfaPattern CfaPattern::parse(std::string_view name) {
    if (name == "bayer" || name == "bayer_rggb") return bayer();
    if (name == "quad" || name == "quad_bayer") return quad_bayer();
    throw ValidationError("unknown CFA pattern '" + std::string(name) + "' (expected bayer or quad)");
}

std::string CfaPattern::name() const {
    return kind_ == PatternKind::QuadBayer ? "quad" : "bayer";
}

void require_tile_multiple(const CfaPattern& pattern, int h, int w) {
    const int t = pattern.period();
    if (h <= 0 || w <= 0 || h % t != 0 || w % t != 0) {
        throw ValidationError("image size " + std::to_string(h) + "x" + std::to_string(w) +
                              " is not a multiple of the " + pattern.name() + " tile size " +
                              std::to_string(t));
    }
}

MosaicImage mosaic(const RgbImage& image, const CfaPattern& pattern) {
    require_tile_multiple(pattern, image.height, image.width);
    MosaicImage out{Plane(image.height, image.width), pattern};
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            out.plane.at(y, x) = image.at(y, x, pattern.channel_at(y, x));
        }
    }
    return out;
}

MosaicImage add_noise(const MosaicImage& mosaic, const NoiseSpec& noise) {
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
        throw ValidationError("noise sigma must be finite and non-negative");
    }
    MosaicImage out = mosaic;
    if (noise.sigma == 0.0) return out;

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.sigma / 255.0);
    for (double& v : out.plane.data) v = std::clamp(v + gauss(rng), 0.0, 1.0);
    return out;
}

RgbImage pack_input(const MosaicImage& mosaic) {
    const Plane& p = mosaic.plane;
    RgbImage out(p.height, p.width, 0.0);
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < p.width; ++x) {
            out.at(y, x, mosaic.pattern.channel_at(y, x)) = p.at(y, x);
        }
    }
    return out;
}

RgbImage cfa_mask(const CfaPattern& pattern, int h, int w) {
    require_tile_multiple(pattern, h, w);
    RgbImage out(h, w, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) out.at(y, x, pattern.channel_at(y, x)) = 1.0;
    }
    return out;
}

}  // namespace jdd::cfa
