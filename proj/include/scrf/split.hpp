#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scrf/grid.hpp"
#include "scrf/image.hpp"

namespace scrf {

/// The five pixel-relation tests evaluated inside a small patch around the
/// query pixel. Value and AbsBias read one position, the rest read two.
enum class SplitKind : std::uint8_t {
    Value = 0,    // f(p1, b)
    AbsBias = 1,  // |f(p1, b) - c|
    Sum = 2,      // f(p1, b) + f(p2, b)
    Diff = 3,     // f(p1, b) - f(p2, b)
    AbsDiff = 4,  // |f(p1, b) - f(p2, b)|
};

constexpr int kSplitKindCount = 5;

struct SplitFunction {
    SplitKind kind = SplitKind::Value;
    std::int32_t channel = 0;
    std::int32_t dy1 = 0, dx1 = 0;
    std::int32_t dy2 = 0, dx2 = 0;  // unused for Value/AbsBias
    double bias = 0.0;              // AbsBias only
    double threshold = 0.0;

    friend bool operator==(const SplitFunction&, const SplitFunction&) = default;
};

enum class PixelState : std::uint8_t { NotAtNode = 0, Left = 1, Right = 2 };

/// Per-pixel ternary state for one node/split: pixels that reached the node
/// are Left or Right, everything else NotAtNode.
class AssignmentMap {
public:
    AssignmentMap() = default;
    AssignmentMap(int height, int width) : state_(height, width, 0) {}

    int height() const { return state_.height(); }
    int width() const { return state_.width(); }

    PixelState state(int r, int c) const { return static_cast<PixelState>(state_(r, c)); }
    void set(int r, int c, PixelState s) { state_(r, c) = static_cast<std::uint8_t>(s); }

    std::size_t count(PixelState s) const {
        std::size_t n = 0;
        for (auto v : state_)
            if (v == static_cast<std::uint8_t>(s)) ++n;
        return n;
    }

    const BinaryMap& raw() const { return state_; }

private:
    BinaryMap state_;
};

struct SampleParams {
    int patch_radius = 2;
    int channel_count = 1;
    /// Attained [min, max] per channel of the stack the split will act on.
    std::vector<std::pair<double, double>> channel_ranges;
};

/// Draws one random candidate: kind and channel uniform, offsets uniform over
/// the (2r+1)^2 patch, bias/threshold uniform over the value range the chosen
/// kind can attain on the chosen channel.
inline SplitFunction sample_split(std::mt19937_64& rng, const SampleParams& params) {
    if (params.channel_count < 1 || params.patch_radius < 0 ||
        params.channel_ranges.size() != static_cast<std::size_t>(params.channel_count))
        throw std::invalid_argument("sample_split: bad params");

    SplitFunction sf;
    sf.kind = static_cast<SplitKind>(std::uniform_int_distribution<int>(0, kSplitKindCount - 1)(rng));
    sf.channel = std::uniform_int_distribution<int>(0, params.channel_count - 1)(rng);

    const int r = params.patch_radius;
    std::uniform_int_distribution<int> off(-r, r);
    sf.dy1 = off(rng);
    sf.dx1 = off(rng);
    const bool pair_kind =
        sf.kind == SplitKind::Sum || sf.kind == SplitKind::Diff || sf.kind == SplitKind::AbsDiff;
    if (pair_kind) {
        sf.dy2 = off(rng);
        sf.dx2 = off(rng);
    }

    auto [lo, hi] = params.channel_ranges[sf.channel];
    const double span = hi - lo;
    auto uniform = [&](double a, double b) {
        return a < b ? std::uniform_real_distribution<double>(a, b)(rng) : a;
    };
    switch (sf.kind) {
        case SplitKind::Value: sf.threshold = uniform(lo, hi); break;
        case SplitKind::AbsBias:
            sf.bias = uniform(lo, hi);
            sf.threshold = uniform(0.0, span);
            break;
        case SplitKind::Sum: sf.threshold = uniform(2.0 * lo, 2.0 * hi); break;
        case SplitKind::Diff: sf.threshold = uniform(-span, span); break;
        case SplitKind::AbsDiff: sf.threshold = uniform(0.0, span); break;
    }
    return sf;
}

/// Evaluates the split's feature at a pixel. Patch positions falling outside
/// the image are clamped to the nearest image coordinate.
inline double feature_value(const SplitFunction& sf, const ChannelStack& stack, int r, int c) {
    if (r < 0 || r >= stack.height() || c < 0 || c >= stack.width())
        throw std::invalid_argument("feature_value: pixel outside image");
    auto clamped = [&](int rr, int cc) {
        rr = std::clamp(rr, 0, stack.height() - 1);
        cc = std::clamp(cc, 0, stack.width() - 1);
        return stack.at(rr, cc, sf.channel);
    };
    const double v1 = clamped(r + sf.dy1, c + sf.dx1);
    switch (sf.kind) {
        case SplitKind::Value: return v1;
        case SplitKind::AbsBias: return std::abs(v1 - sf.bias);
        case SplitKind::Sum: return v1 + clamped(r + sf.dy2, c + sf.dx2);
        case SplitKind::Diff: return v1 - clamped(r + sf.dy2, c + sf.dx2);
        case SplitKind::AbsDiff: return std::abs(v1 - clamped(r + sf.dy2, c + sf.dx2));
    }
    return 0.0;  // unreachable
}

/// Routes node pixels: feature < threshold goes Left, ties and above go Right.
inline AssignmentMap apply_split(const SplitFunction& sf, const ChannelStack& stack,
                                 std::span<const std::uint32_t> node_pixels) {
    if (node_pixels.empty()) throw std::invalid_argument("apply_split: empty node");
    AssignmentMap out(stack.height(), stack.width());
    const int W = stack.width();
    for (std::uint32_t idx : node_pixels) {
        const int r = static_cast<int>(idx) / W;
        const int c = static_cast<int>(idx) % W;
        out.set(r, c, feature_value(sf, stack, r, c) < sf.threshold ? PixelState::Left
                                                                    : PixelState::Right);
    }
    return out;
}

}  // namespace scrf
