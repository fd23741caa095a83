#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scrf/image.hpp"

namespace scrf {

/// Bilateral-filters one channel of `stack`. The kernel is truncated at
/// radius ceil(3 * sigma_spatial); at image borders the weights are
/// renormalized over in-image neighbors. The range weight is computed on the
/// channel being filtered.
inline Grid<double> bilateral_filter_channel(const ChannelStack& stack, int ch,
                                             double sigma_spatial, double sigma_range) {
    if (sigma_spatial <= 0.0 || sigma_range <= 0.0)
        throw std::invalid_argument("bilateral_filter: sigmas must be positive");
    const int H = stack.height(), W = stack.width();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma_spatial));
    const double inv2ss = 1.0 / (2.0 * sigma_spatial * sigma_spatial);
    const double inv2sr = 1.0 / (2.0 * sigma_range * sigma_range);

    std::vector<double> spatial((2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            spatial[(dy + radius) * (2 * radius + 1) + (dx + radius)] =
                std::exp(-(dy * dy + dx * dx) * inv2ss);

    Grid<double> out(H, W);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double center = stack.at(r, c, ch);
            double acc = 0.0, wacc = 0.0;
            const int y0 = std::max(0, r - radius), y1 = std::min(H - 1, r + radius);
            const int x0 = std::max(0, c - radius), x1 = std::min(W - 1, c + radius);
            for (int y = y0; y <= y1; ++y) {
                const double* srow = &spatial[(y - r + radius) * (2 * radius + 1) + radius];
                for (int x = x0; x <= x1; ++x) {
                    double v = stack.at(y, x, ch);
                    double d = v - center;
                    double w = srow[x - c] * std::exp(-d * d * inv2sr);
                    acc += w * v;
                    wacc += w;
                }
            }
            out(r, c) = acc / wacc;
        }
    }
    return out;
}

/// Filters every channel independently with the same sigmas.
inline ChannelStack bilateral_filter(const ChannelStack& stack, double sigma_spatial,
                                     double sigma_range) {
    ChannelStack out(stack.height(), stack.width(), stack.channels());
    for (int ch = 0; ch < stack.channels(); ++ch)
        out.set_channel(ch, bilateral_filter_channel(stack, ch, sigma_spatial, sigma_range));
    return out;
}

}  // namespace scrf
