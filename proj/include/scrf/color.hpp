#pragma once

#include <cmath>
#include <stdexcept>

#include "scrf/image.hpp"

namespace scrf {

namespace detail {

inline double srgb_linearize(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    constexpr double delta3 = delta * delta * delta;
    return t > delta3 ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// D65 reference white.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;

}  // namespace detail

/// sRGB (D65, values in [0,1]) to CIE 1976 L*a*b*. L in [0,100],
/// a and b in roughly [-128, 127] for in-gamut inputs.
inline void rgb_to_lab_pixel(double r, double g, double b, double& L, double& a, double& bb) {
    using namespace detail;
    double rl = srgb_linearize(r), gl = srgb_linearize(g), bl = srgb_linearize(b);
    double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    double fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
    L = 116.0 * fy - 16.0;
    a = 500.0 * (fx - fy);
    bb = 200.0 * (fy - fz);
}

inline ChannelStack rgb_to_lab(const ChannelStack& rgb) {
    if (rgb.channels() != 3) throw std::invalid_argument("rgb_to_lab: stack must have 3 channels");
    ChannelStack lab(rgb.height(), rgb.width(), 3);
    for (int r = 0; r < rgb.height(); ++r)
        for (int c = 0; c < rgb.width(); ++c) {
            double L, a, b;
            rgb_to_lab_pixel(rgb.at(r, c, 0), rgb.at(r, c, 1), rgb.at(r, c, 2), L, a, b);
            lab.at(r, c, 0) = L;
            lab.at(r, c, 1) = a;
            lab.at(r, c, 2) = b;
        }
    return lab;
}

}  // namespace scrf
