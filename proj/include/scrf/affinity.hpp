#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "scrf/forest.hpp"

namespace scrf {

/// Depth of the last node shared by the root-to-leaf paths of two pixels.
/// 0 when they part at the root; the leaf depth when they share a leaf.
inline int lca_depth(const Tree& tree, const ChannelStack& stack, int r1, int c1, int r2,
                     int c2) {
    std::int32_t id = 0;
    int depth = 0;
    while (!tree.nodes[id].is_leaf()) {
        const auto& node = tree.nodes[id];
        const bool l1 =
            detail::feature_value_unchecked(*node.split, stack, r1, c1) < node.split->threshold;
        const bool l2 =
            detail::feature_value_unchecked(*node.split, stack, r2, c2) < node.split->threshold;
        if (l1 != l2) return depth;
        id = l1 ? node.left : node.right;
        ++depth;
    }
    return depth;
}

/// LCA affinity: 1 - (1/T) * sum_t 2^(-depth of the pair's LCA in tree t).
/// 0 when every tree separates the pair at its root; approaches 1 as the
/// pair shares ever deeper leaves.
inline double affinity(const Forest& forest, const ChannelStack& stack, int r1, int c1, int r2,
                       int c2) {
    double acc = 0.0;
    for (const Tree& tree : forest.trees)
        acc += std::exp2(-static_cast<double>(lca_depth(tree, stack, r1, c1, r2, c2)));
    return 1.0 - acc / static_cast<double>(forest.trees.size());
}

/// Sparse symmetric pixel-affinity graph. Nodes are all pixels in row-major
/// order; edges come from co-leaf sampling.
struct AffinityGraph {
    int height = 0, width = 0;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;  // i < j, deduped

    int node_count() const { return height * width; }
};

/// For each pixel p, samples N partners uniformly from the concatenated
/// member lists of the leaves p reached across all trees, and connects them
/// with Eq.-13 weights. Duplicate samples keep the max weight (all duplicates
/// carry the same value, the affinity being a function of the pair).
inline AffinityGraph sample_affinity_graph(const Forest& forest, const ChannelStack& stack,
                                           int samples_per_pixel, std::uint64_t seed) {
    if (samples_per_pixel < 1)
        throw std::invalid_argument("sample_affinity_graph: samples_per_pixel must be >= 1");
    const int H = stack.height(), W = stack.width();
    const int T = static_cast<int>(forest.trees.size());

    // leaf membership lists per tree
    std::vector<SegmentationMap> segs;
    segs.reserve(T);
    std::vector<std::vector<std::vector<std::uint32_t>>> members(T);
    for (int t = 0; t < T; ++t) {
        segs.push_back(leaf_segmentation(forest.trees[t], stack));
        members[t].resize(forest.trees[t].nodes.size());
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < W; ++c)
                members[t][segs[t](r, c)].push_back(static_cast<std::uint32_t>(r) * W + c);
    }

    AffinityGraph graph;
    graph.height = H;
    graph.width = W;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> edge_map;
    for (std::uint32_t p = 0; p < static_cast<std::uint32_t>(H * W); ++p) {
        // derived per-pixel stream keeps the sampling order-independent
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (p + 1)));
        const int pr = static_cast<int>(p) / W, pc = static_cast<int>(p) % W;
        std::size_t pool = 0;
        for (int t = 0; t < T; ++t) pool += members[t][segs[t](pr, pc)].size();
        std::uniform_int_distribution<std::size_t> draw(0, pool - 1);
        for (int s = 0; s < samples_per_pixel; ++s) {
            std::size_t k = draw(rng);
            std::uint32_t q = p;
            for (int t = 0; t < T; ++t) {
                const auto& list = members[t][segs[t](pr, pc)];
                if (k < list.size()) {
                    q = list[k];
                    break;
                }
                k -= list.size();
            }
            if (q == p) continue;  // no self-loops
            const double w =
                affinity(forest, stack, pr, pc, static_cast<int>(q) / W, static_cast<int>(q) % W);
            auto key = std::minmax(p, q);
            auto [it, inserted] = edge_map.try_emplace({key.first, key.second}, w);
            if (!inserted && w > it->second) it->second = w;
        }
    }
    graph.edges.reserve(edge_map.size());
    for (const auto& [key, w] : edge_map) graph.edges.emplace_back(key.first, key.second, w);
    return graph;
}

}  // namespace scrf
