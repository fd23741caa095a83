#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "scrf/forest.hpp"
#include "scrf/grid.hpp"
#include "scrf/split.hpp"

namespace scrf {

using ContourMap = Grid<double>;

/// Neighborhood used by the edge definition; 8-connectivity keeps diagonal
/// boundaries thin.
constexpr int kEdgeNeighborhood[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                         {0, 1},   {1, -1}, {1, 0},  {1, 1}};

/// A pixel is an edge pixel of a node iff it is at the node and some
/// 8-neighbor reached the same node but the opposite child.
inline BinaryMap node_edge_map(const AssignmentMap& assignment) {
    const int H = assignment.height(), W = assignment.width();
    BinaryMap edges(H, W, 0);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const PixelState s = assignment.state(r, c);
            if (s == PixelState::NotAtNode) continue;
            for (const auto& d : kEdgeNeighborhood) {
                const int rr = r + d[0], cc = c + d[1];
                if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
                const PixelState q = assignment.state(rr, cc);
                if (q != PixelState::NotAtNode && q != s) {
                    edges(r, c) = 1;
                    break;
                }
            }
        }
    return edges;
}

/// Pixelwise max (union) of the edge maps of the nodes at one depth.
inline BinaryMap level_edge_map(int height, int width,
                                std::span<const AssignmentMap> assignments_at_depth) {
    BinaryMap level(height, width, 0);
    for (const AssignmentMap& a : assignments_at_depth) {
        BinaryMap e = node_edge_map(a);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                if (e(r, c)) level(r, c) = 1;
    }
    return level;
}

/// Routes the stack through the tree and materializes, for every split node,
/// the ternary assignment its split induces. Index in the result equals the
/// node id (leaf entries stay empty).
inline std::vector<AssignmentMap> compute_node_assignments(const Tree& tree,
                                                           const ChannelStack& stack) {
    check_routable(tree, stack);
    const int H = stack.height(), W = stack.width();
    std::vector<AssignmentMap> assignments(tree.nodes.size());
    for (const TreeNode& node : tree.nodes)
        if (!node.is_leaf()) assignments[node.id] = AssignmentMap(H, W);

    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            std::int32_t id = 0;
            while (!tree.nodes[id].is_leaf()) {
                const auto& node = tree.nodes[id];
                const bool left =
                    detail::feature_value_unchecked(*node.split, stack, r, c) <
                    node.split->threshold;
                assignments[id].set(r, c, left ? PixelState::Left : PixelState::Right);
                id = left ? node.left : node.right;
            }
        }
    return assignments;
}

/// Maximum attainable tree-contour value: sum of the level weights.
inline double contour_weight_bound(int max_depth) {
    double w = 0.0;
    for (int d = 0; d <= max_depth; ++d)
        w += static_cast<double>(max_depth - d) / max_depth;
    return w;
}

/// Depth-weighted sum of level edge maps, weight (D-d)/D for level d. Levels
/// close to the root dominate; level D contributes nothing.
inline ContourMap tree_contour(const Tree& tree, const ChannelStack& stack, int max_depth) {
    check_routable(tree, stack);
    const int H = stack.height(), W = stack.width();
    std::vector<AssignmentMap> assignments = compute_node_assignments(tree, stack);

    ContourMap contour(H, W, 0.0);
    for (int d = 0; d <= max_depth; ++d) {
        std::vector<AssignmentMap> at_depth;
        for (const TreeNode& node : tree.nodes)
            if (!node.is_leaf() && node.depth == d) at_depth.push_back(assignments[node.id]);
        if (at_depth.empty()) continue;
        BinaryMap level = level_edge_map(H, W, at_depth);
        const double weight = static_cast<double>(max_depth - d) / max_depth;
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < W; ++c)
                if (level(r, c)) contour(r, c) += weight;
    }
    return contour;
}

/// Arithmetic mean of the per-tree contours, in fixed tree order.
inline ContourMap forest_contour(const Forest& forest, const ChannelStack& stack) {
    ContourMap acc(stack.height(), stack.width(), 0.0);
    for (const Tree& tree : forest.trees) {
        ContourMap tc = tree_contour(tree, stack, forest.params.max_depth);
        for (int r = 0; r < acc.height(); ++r)
            for (int c = 0; c < acc.width(); ++c) acc(r, c) += tc(r, c);
    }
    const double inv = 1.0 / static_cast<double>(forest.trees.size());
    for (auto& v : acc) v *= inv;
    return acc;
}

/// Linear rescale to [0,1]; an all-zero map stays all-zero.
inline ContourMap normalize_contour(const ContourMap& map) {
    double max_v = 0.0;
    for (double v : map) max_v = std::max(max_v, v);
    ContourMap out(map.height(), map.width(), 0.0);
    if (max_v <= 0.0) return out;
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c) out(r, c) = map(r, c) / max_v;
    return out;
}

}  // namespace scrf
