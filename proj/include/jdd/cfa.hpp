#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "jdd/image.hpp"

namespace jdd::cfa {

enum Channel : int { R = 0, G = 1, B = 2 };

enum class PatternKind { BayerRggb, QuadBayer };

/// Periodic colour filter layout. The tile is stored at the largest supported
/// period (4x4); `period` says how much of it is meaningful.
class CfaPattern {
public:
    static CfaPattern bayer();
    static CfaPattern quad_bayer();
    static CfaPattern from_kind(PatternKind kind);
    /// Accepts "bayer", "bayer_rggb", "quad", "quad_bayer" (case sensitive).
    static CfaPattern parse(std::string_view name);

    PatternKind kind() const { return kind_; }
    int period() const { return period_; }
    /// Short CLI name: "bayer" or "quad".
    std::string name() const;

    int channel_at(int y, int x) const { return tile_[y % period_][x % period_]; }
    int tile_at(int ty, int tx) const { return tile_[ty][tx]; }

    bool operator==(const CfaPattern& other) const { return kind_ == other.kind_; }

private:
    CfaPattern(PatternKind kind, int period, std::array<std::array<int, 4>, 4> tile)
        : kind_(kind), period_(period), tile_(tile) {}

    PatternKind kind_;
    int period_;
    std::array<std::array<int, 4>, 4> tile_;
};

struct MosaicImage {
    Plane plane;
    CfaPattern pattern = CfaPattern::bayer();
};

/// Gaussian noise level on the 8-bit scale; applied as sigma / 255.
struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Throws ValidationError unless h and w are positive multiples of the period.
void require_tile_multiple(const CfaPattern& pattern, int h, int w);

MosaicImage mosaic(const RgbImage& image, const CfaPattern& pattern);

/// clip(plane + N(0, sigma/255), 0, 1); bit-reproducible for a given seed.
MosaicImage add_noise(const MosaicImage& mosaic, const NoiseSpec& noise);

/// Zero-filled 3-channel tensor with each sample in its own colour channel.
RgbImage pack_input(const MosaicImage& mosaic);

/// One-hot channel mask of the pattern over an h x w grid.
RgbImage cfa_mask(const CfaPattern& pattern, int h, int w);

}  // namespace jdd::cfa
