#include "jdd/color_torch.hpp"

#include <cmath>
#include <numbers>

#include "jdd/color.hpp"

namespace jdd::color {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kRad = std::numbers::pi / 180.0;

// sqrt with value 0 and zero gradient below the guard.
torch::Tensor safe_sqrt(const torch::Tensor& x) {
    auto ok = x > kGuardEps;
    return torch::where(ok, torch::sqrt(torch::where(ok, x, torch::ones_like(x))), torch::zeros_like(x));
}

torch::Tensor lab_f(const torch::Tensor& t) {
    constexpr double delta = 6.0 / 29.0;
    constexpr double knee = delta * delta * delta;
    auto upper = t > knee;
    auto cube_root = torch::pow(torch::where(upper, t, torch::full_like(t, knee)), 1.0 / 3.0);
    return torch::where(upper, cube_root, t / (3.0 * delta * delta) + 4.0 / 29.0);
}

// Hue in degrees in [0, 360); 0 where the chroma vanishes.
torch::Tensor hue_deg(const torch::Tensor& b, const torch::Tensor& a) {
    auto zero = (a * a + b * b) <= kGuardEps;
    auto a_safe = torch::where(zero, torch::ones_like(a), a);
    auto b_safe = torch::where(zero, torch::zeros_like(b), b);
    auto h = torch::atan2(b_safe, a_safe) * kDeg;
    return torch::where(h < 0, h + 360.0, h);
}

}  // namespace

torch::Tensor srgb_to_lab(const torch::Tensor& rgb) {
    auto lin = torch::where(rgb <= 0.04045, rgb / 12.92,
                            torch::pow((torch::clamp_min(rgb, 0.04045) + 0.055) / 1.055, 2.4));
    auto r = lin.select(1, 0);
    auto g = lin.select(1, 1);
    auto b = lin.select(1, 2);
    auto x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    auto y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    auto z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    auto fx = lab_f(x / WhitePoint::X);
    auto fy = lab_f(y / WhitePoint::Y);
    auto fz = lab_f(z / WhitePoint::Z);
    return torch::stack({116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)}, 1);
}

torch::Tensor ciede2000(const torch::Tensor& lab1, const torch::Tensor& lab2) {
    const double pow25_7 = std::pow(25.0, 7.0);
    auto L1 = lab1.select(1, 0);
    auto a1 = lab1.select(1, 1);
    auto b1 = lab1.select(1, 2);
    auto L2 = lab2.select(1, 0);
    auto a2 = lab2.select(1, 1);
    auto b2 = lab2.select(1, 2);

    auto c1 = safe_sqrt(a1 * a1 + b1 * b1);
    auto c2 = safe_sqrt(a2 * a2 + b2 * b2);
    auto c_bar7 = torch::pow(0.5 * (c1 + c2), 7.0);
    auto g = 0.5 * (1.0 - safe_sqrt(c_bar7 / (c_bar7 + pow25_7)));

    auto a1p = (1.0 + g) * a1;
    auto a2p = (1.0 + g) * a2;
    auto c1p = safe_sqrt(a1p * a1p + b1 * b1);
    auto c2p = safe_sqrt(a2p * a2p + b2 * b2);
    auto h1p = hue_deg(b1, a1p);
    auto h2p = hue_deg(b2, a2p);

    auto dLp = L2 - L1;
    auto dCp = c2p - c1p;

    auto cc = c1p * c2p;
    auto chromatic = cc > 0;
    auto diff = h2p - h1p;
    auto dhp = torch::where(diff > 180.0, diff - 360.0, torch::where(diff < -180.0, diff + 360.0, diff));
    dhp = torch::where(chromatic, dhp, torch::zeros_like(dhp));
    auto dHp = 2.0 * safe_sqrt(cc) * torch::sin(0.5 * dhp * kRad);

    auto L_bar = 0.5 * (L1 + L2);
    auto Cp_bar = 0.5 * (c1p + c2p);
    auto sum = h1p + h2p;
    auto near = torch::abs(h1p - h2p) <= 180.0;
    auto hp_bar = torch::where(near, 0.5 * sum, torch::where(sum < 360.0, 0.5 * (sum + 360.0), 0.5 * (sum - 360.0)));
    hp_bar = torch::where(chromatic, hp_bar, sum);

    auto t = 1.0 - 0.17 * torch::cos((hp_bar - 30.0) * kRad) + 0.24 * torch::cos(2.0 * hp_bar * kRad) +
             0.32 * torch::cos((3.0 * hp_bar + 6.0) * kRad) - 0.20 * torch::cos((4.0 * hp_bar - 63.0) * kRad);
    auto d_theta = 30.0 * torch::exp(-torch::pow((hp_bar - 275.0) / 25.0, 2.0));
    auto cp_bar7 = torch::pow(Cp_bar, 7.0);
    auto rc = 2.0 * safe_sqrt(cp_bar7 / (cp_bar7 + pow25_7));
    auto l50 = (L_bar - 50.0) * (L_bar - 50.0);
    auto sl = 1.0 + 0.015 * l50 / torch::sqrt(20.0 + l50);
    auto sc = 1.0 + 0.045 * Cp_bar;
    auto sh = 1.0 + 0.015 * Cp_bar * t;
    auto rt = -torch::sin(2.0 * d_theta * kRad) * rc;

    auto tl = dLp / sl;
    auto tc = dCp / sc;
    auto th = dHp / sh;
    return safe_sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

}  // namespace jdd::color
