#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "scrf/coherency.hpp"
#include "scrf/split.hpp"

namespace scrf {

/// Floor for the per-channel variance before taking logs; keeps constant
/// regions finite.
constexpr double kVarianceEpsilon = 1e-12;

namespace detail {

/// Population variance from accumulated sums. Inputs here are bounded image
/// values, so the sum-of-squares form stays well conditioned.
inline double variance_from_sums(double sum, double sum_sq, std::size_t n) {
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    return var > 0.0 ? var : 0.0;
}

inline double log_clamped_variance(double var) {
    return std::log(std::max(var, kVarianceEpsilon));
}

}  // namespace detail

/// Differential entropy of a single-channel Gaussian fit:
/// 0.5 * ln(2*pi*e * max(var, eps)) with var the population variance.
inline double channel_entropy(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("channel_entropy: empty sample");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    const double var = detail::variance_from_sums(sum, sum_sq, values.size());
    return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * std::max(var, kVarianceEpsilon));
}

/// Unsupervised information gain of a split on one channel:
/// ln var(S) - sum_a (|S_a|/|S|) ln var(S_a), natural log, eps-clamped.
inline double information_gain(const AssignmentMap& assignment, const ChannelStack& stack,
                               int channel) {
    double sl = 0, sl2 = 0, sr = 0, sr2 = 0;
    std::size_t nl = 0, nr = 0;
    for (int r = 0; r < assignment.height(); ++r)
        for (int c = 0; c < assignment.width(); ++c) {
            const PixelState s = assignment.state(r, c);
            if (s == PixelState::NotAtNode) continue;
            const double v = stack.at(r, c, channel);
            if (s == PixelState::Left) {
                sl += v; sl2 += v * v; ++nl;
            } else {
                sr += v; sr2 += v * v; ++nr;
            }
        }
    if (nl == 0 || nr == 0) throw std::invalid_argument("information_gain: a side is empty");
    const std::size_t n = nl + nr;
    const double var_parent = detail::variance_from_sums(sl + sr, sl2 + sr2, n);
    const double var_l = detail::variance_from_sums(sl, sl2, nl);
    const double var_r = detail::variance_from_sums(sr, sr2, nr);
    const double wl = static_cast<double>(nl) / static_cast<double>(n);
    const double wr = static_cast<double>(nr) / static_cast<double>(n);
    return detail::log_clamped_variance(var_parent) - wl * detail::log_clamped_variance(var_l) -
           wr * detail::log_clamped_variance(var_r);
}

/// Overall split score: information gain plus lambda times the spatial
/// coherency sum over node pixels.
inline double score_split(const AssignmentMap& assignment, const ChannelStack& stack, int channel,
                          double lambda, int coherency_radius) {
    const double gain = information_gain(assignment, stack, channel);
    if (lambda == 0.0) return gain;
    return gain + lambda * coherency_sum(assignment, coherency_radius);
}

}  // namespace scrf
