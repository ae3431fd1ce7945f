#pragma once

#include "jdd/image.hpp"

namespace jdd::color {

struct Lab {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Per-pixel CIELAB planes.
struct LabImage {
    Plane L;
    Plane a;
    Plane b;
};

/// D65 reference white implied by the sRGB primaries (row sums of the
/// RGB->XYZ matrix), so that sRGB white maps to a = b = 0.
struct WhitePoint {
    static constexpr double X = 0.4124564 + 0.3575761 + 0.1804375;
    static constexpr double Y = 0.2126729 + 0.7151522 + 0.0721750;
    static constexpr double Z = 0.0193339 + 0.1191920 + 0.9503041;
};

double srgb_to_linear(double c);

/// sRGB (gamma-encoded, [0,1]) -> CIELAB under D65 / 2 degree observer.
Lab srgb_to_lab(double r, double g, double b);

/// Throws ValidationError if any value is outside [0,1].
LabImage srgb_to_lab(const RgbImage& image);

/// CIEDE2000 colour difference with kL = kC = kH = 1.
double ciede2000(const Lab& lab1, const Lab& lab2);

struct DeltaEMap {
    Plane map;
    double mean = 0.0;
};

DeltaEMap delta_e_map(const RgbImage& img1, const RgbImage& img2);

}  // namespace jdd::color
