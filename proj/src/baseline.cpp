#include "jdd/baseline.hpp"

#include <cmath>
#include <cstdlib>

namespace jdd::baseline {

cfa::MosaicImage denoise_same_colour(const cfa::MosaicImage& mosaic, double sigma_px, int radius) {
    const Plane& in = mosaic.plane;
    cfa::MosaicImage out = mosaic;
    const double inv2s2 = 1.0 / (2.0 * sigma_px * sigma_px);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            const int c = mosaic.pattern.channel_at(y, x);
            double acc = 0.0;
            double norm = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= in.height) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= in.width || mosaic.pattern.channel_at(yy, xx) != c) continue;
                    const double w = std::exp(-(dy * dy + dx * dx) * inv2s2);
                    acc += w * in.at(yy, xx);
                    norm += w;
                }
            }
            out.plane.at(y, x) = acc / norm;
        }
    }
    return out;
}

RgbImage demosaic_bilinear(const cfa::MosaicImage& mosaic) {
    constexpr int radius = 2;
    const Plane& in = mosaic.plane;
    RgbImage out(in.height, in.width);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            const int own = mosaic.pattern.channel_at(y, x);
            double acc[3] = {0.0, 0.0, 0.0};
            double norm[3] = {0.0, 0.0, 0.0};
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= in.height) continue;
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= in.width) continue;
                    const int c = mosaic.pattern.channel_at(yy, xx);
                    const double w = (radius + 1 - std::abs(dy)) * (radius + 1 - std::abs(dx));
                    acc[c] += w * in.at(yy, xx);
                    norm[c] += w;
                }
            }
            for (int c = 0; c < 3; ++c) {
                if (c == own) {
                    out.at(y, x, c) = in.at(y, x);
                } else {
                    out.at(y, x, c) = norm[c] > 0.0 ? acc[c] / norm[c] : 0.0;
                }
            }
        }
    }
    return out;
}

RgbImage denoise_then_demosaic(const cfa::MosaicImage& mosaic) {
    return demosaic_bilinear(denoise_same_colour(mosaic));
}

}  // namespace jdd::baseline
