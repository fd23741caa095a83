#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "scrf/errors.hpp"
#include "scrf/grid.hpp"
#include "scrf/image.hpp"

namespace scrf {

enum class SynthShape : std::uint8_t { CenteredCircle = 0, HalfPlane = 1 };

struct GmmComponent {
    double mean = 0.0;
    double std_dev = 0.05;
    double weight = 0.5;
};

/// Two-component GMM for one region.
struct RegionGmm {
    GmmComponent c0, c1;
};

/// Two-region synthetic image: the inner region (circle or left half-plane)
/// and the background each draw pixel intensities from their own GMM. The
/// default means interleave (inner between background components and vice
/// versa) so no single intensity threshold separates the regions.
struct SynthSpec {
    int size = 64;
    SynthShape shape = SynthShape::CenteredCircle;
    double radius_fraction = 0.25;
    RegionGmm inner{{0.25, 0.05, 0.5}, {0.75, 0.05, 0.5}};
    RegionGmm outer{{0.45, 0.05, 0.5}, {0.95, 0.05, 0.5}};
    std::uint64_t seed = 0;

    void validate() const {
        if (size < 2) throw std::invalid_argument("SynthSpec: size must be >= 2");
        if (shape == SynthShape::CenteredCircle &&
            (radius_fraction <= 0.0 || radius_fraction >= 0.5))
            throw std::invalid_argument("SynthSpec: radius_fraction must be in (0, 0.5)");
        for (const RegionGmm* g : {&inner, &outer}) {
            if (g->c0.std_dev <= 0.0 || g->c1.std_dev <= 0.0)
                throw std::invalid_argument("SynthSpec: stds must be positive");
            if (std::abs(g->c0.weight + g->c1.weight - 1.0) > 1e-12)
                throw std::invalid_argument("SynthSpec: weights must sum to 1");
            if (g->c0.weight < 0.0 || g->c1.weight < 0.0)
                throw std::invalid_argument("SynthSpec: weights must be nonnegative");
        }
    }
};

struct SynthResult {
    ChannelStack image;   // single channel
    BinaryMap boundary;   // pixels whose 8-neighborhood crosses the region border
    BinaryMap region;     // 1 = inner region
};

/// Analytic region membership, independent of the sampled noise.
inline bool synth_inside(const SynthSpec& spec, int r, int c) {
    if (spec.shape == SynthShape::HalfPlane) return c < spec.size / 2;
    const double center = (spec.size - 1) / 2.0;
    const double radius = spec.radius_fraction * spec.size;
    const double dy = r - center, dx = c - center;
    return dy * dy + dx * dx <= radius * radius;
}

inline SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    const int n = spec.size;
    SynthResult out{ChannelStack(n, n, 1), BinaryMap(n, n, 0), BinaryMap(n, n, 0)};

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.region(r, c) = synth_inside(spec, r, c) ? 1 : 0;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const RegionGmm& g = out.region(r, c) ? spec.inner : spec.outer;
            const GmmComponent& comp = pick(rng) < g.c0.weight ? g.c0 : g.c1;
            double v = std::normal_distribution<double>(comp.mean, comp.std_dev)(rng);
            out.image.at(r, c, 0) = std::clamp(v, 0.0, 1.0);
        }

    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const std::uint8_t mine = out.region(r, c);
            for (int dr = -1; dr <= 1 && !out.boundary(r, c); ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                    if (out.region(rr, cc) != mine) {
                        out.boundary(r, c) = 1;
                        break;
                    }
                }
        }
    return out;
}

// ---- key=value sidecar --------------------------------------------------

inline void write_synth_sidecar(const std::string& path, const SynthSpec& spec) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for write: " + path);
    os.precision(17);
    os << "size = " << spec.size << "\n";
    os << "shape = " << (spec.shape == SynthShape::CenteredCircle ? "circle" : "halfplane") << "\n";
    os << "radius_fraction = " << spec.radius_fraction << "\n";
    os << "inner_means = " << spec.inner.c0.mean << "," << spec.inner.c1.mean << "\n";
    os << "inner_stds = " << spec.inner.c0.std_dev << "," << spec.inner.c1.std_dev << "\n";
    os << "inner_weights = " << spec.inner.c0.weight << "," << spec.inner.c1.weight << "\n";
    os << "outer_means = " << spec.outer.c0.mean << "," << spec.outer.c1.mean << "\n";
    os << "outer_stds = " << spec.outer.c0.std_dev << "," << spec.outer.c1.std_dev << "\n";
    os << "outer_weights = " << spec.outer.c0.weight << "," << spec.outer.c1.weight << "\n";
    os << "seed = " << spec.seed << "\n";
}

}  // namespace scrf
