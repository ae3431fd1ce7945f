#include "jdd/color.hpp"

#include <cmath>
#include <numbers>

namespace jdd::color {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kRad = std::numbers::pi / 180.0;

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    if (t > delta * delta * delta) return std::cbrt(t);
    return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// Hue angle in degrees, [0, 360).
double hue_deg(double b, double a) {
    if (a == 0.0 && b == 0.0) return 0.0;
    double h = std::atan2(b, a) * kDeg;
    return h < 0.0 ? h + 360.0 : h;
}

}  // namespace

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

Lab srgb_to_lab(double r, double g, double b) {
    const double lr = srgb_to_linear(r);
    const double lg = srgb_to_linear(g);
    const double lb = srgb_to_linear(b);

    const double x = 0.4124564 * lr + 0.3575761 * lg + 0.1804375 * lb;
    const double y = 0.2126729 * lr + 0.7151522 * lg + 0.0721750 * lb;
    const double z = 0.0193339 * lr + 0.1191920 * lg + 0.9503041 * lb;

    const double fx = lab_f(x / WhitePoint::X);
    const double fy = lab_f(y / WhitePoint::Y);
    const double fz = lab_f(z / WhitePoint::Z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage srgb_to_lab(const RgbImage& image) {
    LabImage out{Plane(image.height, image.width), Plane(image.height, image.width),
                 Plane(image.height, image.width)};
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const double r = image.at(y, x, 0);
            const double g = image.at(y, x, 1);
            const double b = image.at(y, x, 2);
            if (!(r >= 0.0 && r <= 1.0 && g >= 0.0 && g <= 1.0 && b >= 0.0 && b <= 1.0)) {
                throw ValidationError("srgb_to_lab: pixel value outside [0,1]");
            }
            const Lab lab = srgb_to_lab(r, g, b);
            out.L.at(y, x) = lab.L;
            out.a.at(y, x) = lab.a;
            out.b.at(y, x) = lab.b;
        }
    }
    return out;
}

double ciede2000(const Lab& lab1, const Lab& lab2) {
    const double c1 = std::hypot(lab1.a, lab1.b);
    const double c2 = std::hypot(lab2.a, lab2.b);
    const double c_bar = 0.5 * (c1 + c2);
    const double c_bar7 = std::pow(c_bar, 7.0);
    const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));

    const double a1p = (1.0 + g) * lab1.a;
    const double a2p = (1.0 + g) * lab2.a;
    const double c1p = std::hypot(a1p, lab1.b);
    const double c2p = std::hypot(a2p, lab2.b);
    const double h1p = hue_deg(lab1.b, a1p);
    const double h2p = hue_deg(lab2.b, a2p);

    const double dLp = lab2.L - lab1.L;
    const double dCp = c2p - c1p;

    const double cc = c1p * c2p;
    double dhp = 0.0;
    if (cc != 0.0) {
        dhp = h2p - h1p;
        if (dhp > 180.0) {
            dhp -= 360.0;
        } else if (dhp < -180.0) {
            dhp += 360.0;
        }
    }
    const double dHp = 2.0 * std::sqrt(cc) * std::sin(0.5 * dhp * kRad);

    const double L_bar = 0.5 * (lab1.L + lab2.L);
    const double Cp_bar = 0.5 * (c1p + c2p);
    double hp_bar = h1p + h2p;
    if (cc != 0.0) {
        if (std::abs(h1p - h2p) <= 180.0) {
            hp_bar *= 0.5;
        } else if (h1p + h2p < 360.0) {
            hp_bar = 0.5 * (hp_bar + 360.0);
        } else {
            hp_bar = 0.5 * (hp_bar - 360.0);
        }
    }

    const double t = 1.0 - 0.17 * std::cos((hp_bar - 30.0) * kRad) + 0.24 * std::cos(2.0 * hp_bar * kRad) +
                     0.32 * std::cos((3.0 * hp_bar + 6.0) * kRad) - 0.20 * std::cos((4.0 * hp_bar - 63.0) * kRad);
    const double d_theta = 30.0 * std::exp(-std::pow((hp_bar - 275.0) / 25.0, 2.0));
    const double cp_bar7 = std::pow(Cp_bar, 7.0);
    const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
    const double l50 = (L_bar - 50.0) * (L_bar - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * Cp_bar;
    const double sh = 1.0 + 0.015 * Cp_bar * t;
    const double rt = -std::sin(2.0 * d_theta * kRad) * rc;

    const double tl = dLp / sl;
    const double tc = dCp / sc;
    const double th = dHp / sh;
    return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

DeltaEMap delta_e_map(const RgbImage& img1, const RgbImage& img2) {
    require_same_shape(img1, img2, "delta_e_map");
    const LabImage lab1 = srgb_to_lab(img1);
    const LabImage lab2 = srgb_to_lab(img2);
    DeltaEMap out{Plane(img1.height, img1.width), 0.0};
    double sum = 0.0;
    for (std::size_t i = 0; i < out.map.data.size(); ++i) {
        const double d = ciede2000({lab1.L.data[i], lab1.a.data[i], lab1.b.data[i]},
                                   {lab2.L.data[i], lab2.a.data[i], lab2.b.data[i]});
        out.map.data[i] = d;
        sum += d;
    }
    out.mean = sum / static_cast<double>(out.map.data.size());
    return out;
}

}  // namespace jdd::color
