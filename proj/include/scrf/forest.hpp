#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "scrf/coherency.hpp"
#include "scrf/entropy.hpp"
#include "scrf/image.hpp"
#include "scrf/parallel.hpp"
#include "scrf/split.hpp"

namespace scrf {

enum class LambdaMode : std::uint8_t {
    Fixed = 0,           // constant spatial weight
    GaussianPerNode = 1, // drawn per node from N(mean, std^2), clamped at 0
    Zero = 2,            // plain density forest, coherency never evaluated
};

struct TrainParams {
    int tree_count = 12;
    int max_depth = 5;
    int candidates_per_node = 1000;
    int min_leaf_pixels = 1000;
    int split_patch_radius = 2;  // 5x5 split patches
    int coherency_radius = 4;    // 9x9 coherency windows
    LambdaMode lambda_mode = LambdaMode::GaussianPerNode;
    double lambda = 8.0;       // Fixed mode
    double lambda_mean = 8.0;  // GaussianPerNode mode
    double lambda_std = 4.0;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (tree_count < 1) throw std::invalid_argument("TrainParams: tree_count must be >= 1");
        if (max_depth < 1) throw std::invalid_argument("TrainParams: max_depth must be >= 1");
        if (candidates_per_node < 1)
            throw std::invalid_argument("TrainParams: candidates_per_node must be >= 1");
        if (min_leaf_pixels < 1)
            throw std::invalid_argument("TrainParams: min_leaf_pixels must be >= 1");
        if (split_patch_radius < 0 || coherency_radius < 0)
            throw std::invalid_argument("TrainParams: radii must be >= 0");
        if (lambda_std < 0) throw std::invalid_argument("TrainParams: lambda_std must be >= 0");
        if (!std::isfinite(lambda) || !std::isfinite(lambda_mean) || !std::isfinite(lambda_std))
            throw std::invalid_argument("TrainParams: lambda values must be finite");
        if (lambda_mode == LambdaMode::Fixed && lambda < 0)
            throw std::invalid_argument("TrainParams: lambda must be >= 0");
    }

    /// A model trained with no spatial term is an ordinary density forest.
    bool is_plain_rf() const {
        return lambda_mode == LambdaMode::Zero ||
               (lambda_mode == LambdaMode::Fixed && lambda == 0.0);
    }

    friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

struct LeafStats {
    std::vector<double> mean;      // per channel
    std::vector<double> variance;  // per channel, population

    friend bool operator==(const LeafStats&, const LeafStats&) = default;
};

struct TreeNode {
    std::int32_t id = 0;
    std::int32_t depth = 0;
    std::int32_t left = -1;   // -1 for leaves
    std::int32_t right = -1;
    std::optional<SplitFunction> split;  // nullopt <=> leaf
    LeafStats stats;                     // populated for leaves

    // Training-time bookkeeping; not serialized.
    std::uint32_t pixel_count = 0;
    double score = 0.0;        // chosen G at split nodes
    double lambda_used = 0.0;  // spatial weight drawn at this node

    bool is_leaf() const { return !split.has_value(); }
};

struct Tree {
    std::uint64_t seed = 0;
    std::vector<TreeNode> nodes;  // breadth-first order, ids equal indices
    int trained_height = 0, trained_width = 0, trained_channels = 0;

    std::size_t leaf_count() const {
        std::size_t n = 0;
        for (const auto& node : nodes)
            if (node.is_leaf()) ++n;
        return n;
    }
};

struct Forest {
    TrainParams params;
    int height = 0, width = 0, channels = 0;
    std::vector<Tree> trees;
};

/// Test seam for the spatial term: given the node pixels and one side byte
/// per pixel (nonzero = left), returns the Eq. 7 coherency sum. When empty,
/// training uses the built-in integral-image evaluator.
using CoherencySumFn =
    std::function<double(std::span<const std::uint32_t> pixels, std::span<const std::uint8_t> sides,
                         int height, int width, int radius)>;

namespace detail {

/// feature_value without the bounds check; trainer pixels are always inside.
inline double feature_value_unchecked(const SplitFunction& sf, const ChannelStack& stack, int r,
                                      int c) {
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
    return 0.0;
}

struct TrainScratch {
    SampleParams sample;
    CoherencySumFn coherency_override;
    CoherencyScratch coherency;
    std::vector<std::uint8_t> sides, best_sides;
    std::vector<int> rows, cols;
};

struct NodeOutcome {
    bool is_leaf = true;
    SplitFunction split;
    double score = 0.0;
    double lambda_used = 0.0;
    std::vector<std::uint32_t> left_pixels, right_pixels;
};

inline double draw_lambda(const TrainParams& params, std::mt19937_64& rng) {
    switch (params.lambda_mode) {
        case LambdaMode::Fixed: return params.lambda;
        case LambdaMode::Zero: return 0.0;
        case LambdaMode::GaussianPerNode: {
            double v = std::normal_distribution<double>(params.lambda_mean, params.lambda_std)(rng);
            return v > 0.0 ? v : 0.0;
        }
    }
    return 0.0;
}

inline NodeOutcome train_node_impl(const ChannelStack& stack,
                                   std::span<const std::uint32_t> pixels,
                                   const TrainParams& params, std::mt19937_64& rng, int depth,
                                   TrainScratch& scratch) {
    NodeOutcome out;
    const std::size_t n = pixels.size();
    if (depth >= params.max_depth || n < 2 * static_cast<std::size_t>(params.min_leaf_pixels))
        return out;

    const double lambda = draw_lambda(params, rng);
    out.lambda_used = lambda;

    const int W = stack.width();
    scratch.rows.resize(n);
    scratch.cols.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scratch.rows[i] = static_cast<int>(pixels[i]) / W;
        scratch.cols[i] = static_cast<int>(pixels[i]) % W;
    }
    scratch.sides.resize(n);
    const bool use_builtin_coherency = lambda > 0.0 && !scratch.coherency_override;
    if (use_builtin_coherency)
        scratch.coherency.begin_node(pixels, stack.height(), stack.width(),
                                     params.coherency_radius);

    double best_g = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    for (int cand = 0; cand < params.candidates_per_node; ++cand) {
        const SplitFunction sf = sample_split(rng, scratch.sample);

        std::size_t nl = 0;
        double sl = 0, sl2 = 0, sr = 0, sr2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const int r = scratch.rows[i], c = scratch.cols[i];
            const bool left = feature_value_unchecked(sf, stack, r, c) < sf.threshold;
            scratch.sides[i] = left ? 1 : 0;
            const double x = stack.at(r, c, sf.channel);
            if (left) {
                sl += x; sl2 += x * x; ++nl;
            } else {
                sr += x; sr2 += x * x;
            }
        }
        const std::size_t nr = n - nl;
        if (nl < static_cast<std::size_t>(params.min_leaf_pixels) ||
            nr < static_cast<std::size_t>(params.min_leaf_pixels))
            continue;

        const double var_parent = variance_from_sums(sl + sr, sl2 + sr2, n);
        const double var_l = variance_from_sums(sl, sl2, nl);
        const double var_r = variance_from_sums(sr, sr2, nr);
        const double wl = static_cast<double>(nl) / static_cast<double>(n);
        double g = log_clamped_variance(var_parent) - wl * log_clamped_variance(var_l) -
                   (1.0 - wl) * log_clamped_variance(var_r);
        if (lambda > 0.0) {
            const double coh =
                scratch.coherency_override
                    ? scratch.coherency_override(pixels, scratch.sides, stack.height(),
                                                 stack.width(), params.coherency_radius)
                    : scratch.coherency.eval(pixels, scratch.sides);
            g += lambda * coh;
        }
        if (g > best_g) {  // strict: ties keep the first-sampled candidate
            best_g = g;
            have_best = true;
            out.split = sf;
            scratch.best_sides = scratch.sides;
        }
    }

    if (!have_best || best_g <= 0.0) return out;

    out.is_leaf = false;
    out.score = best_g;
    for (std::size_t i = 0; i < n; ++i)
        (scratch.best_sides[i] ? out.left_pixels : out.right_pixels).push_back(pixels[i]);
    return out;
}

inline LeafStats compute_leaf_stats(const ChannelStack& stack,
                                    std::span<const std::uint32_t> pixels) {
    const int C = stack.channels(), W = stack.width();
    LeafStats stats;
    stats.mean.assign(C, 0.0);
    stats.variance.assign(C, 0.0);
    std::vector<double> sum(C, 0.0), sum_sq(C, 0.0);
    for (std::uint32_t idx : pixels) {
        const int r = static_cast<int>(idx) / W, c = static_cast<int>(idx) % W;
        for (int ch = 0; ch < C; ++ch) {
            const double v = stack.at(r, c, ch);
            sum[ch] += v;
            sum_sq[ch] += v * v;
        }
    }
    for (int ch = 0; ch < C; ++ch) {
        stats.mean[ch] = sum[ch] / static_cast<double>(pixels.size());
        stats.variance[ch] = variance_from_sums(sum[ch], sum_sq[ch], pixels.size());
    }
    return stats;
}

}  // namespace detail

/// Result of deciding one node: either a leaf, or the argmax-G split with the
/// child pixel sets.
struct NodeDecision {
    bool is_leaf = true;
    SplitFunction split;
    double score = 0.0;
    double lambda_used = 0.0;
    std::vector<std::uint32_t> left_pixels, right_pixels;
};

/// Scores candidates_per_node random splits at one node and returns the best
/// by G = information gain + lambda * coherency sum, or a leaf when stopping
/// rules fire (depth reached, node too small, or no positive-scoring valid
/// candidate).
inline NodeDecision train_node(const ChannelStack& stack, std::span<const std::uint32_t> pixels,
                               const TrainParams& params, std::mt19937_64& rng, int depth) {
    if (pixels.empty()) throw std::invalid_argument("train_node: empty node");
    params.validate();
    detail::TrainScratch scratch;
    scratch.sample = SampleParams{params.split_patch_radius, stack.channels(),
                                  stack.channel_ranges()};
    auto outcome = detail::train_node_impl(stack, pixels, params, rng, depth, scratch);
    NodeDecision decision;
    decision.is_leaf = outcome.is_leaf;
    decision.split = outcome.split;
    decision.score = outcome.score;
    decision.lambda_used = outcome.lambda_used;
    decision.left_pixels = std::move(outcome.left_pixels);
    decision.right_pixels = std::move(outcome.right_pixels);
    return decision;
}

/// Trains one tree breadth-first from all image pixels.
inline Tree train_tree(const ChannelStack& stack, const TrainParams& params, std::uint64_t seed,
                       const CoherencySumFn& coherency = {}) {
    params.validate();
    if (stack.pixel_count() < static_cast<std::size_t>(params.min_leaf_pixels))
        throw std::invalid_argument("train_tree: image smaller than min_leaf_pixels");

    Tree tree;
    tree.seed = seed;
    tree.trained_height = stack.height();
    tree.trained_width = stack.width();
    tree.trained_channels = stack.channels();

    std::mt19937_64 rng(seed);
    detail::TrainScratch scratch;
    scratch.sample = SampleParams{params.split_patch_radius, stack.channels(),
                                  stack.channel_ranges()};
    scratch.coherency_override = coherency;

    std::vector<std::uint32_t> all(stack.pixel_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);

    // BFS frontier; pixel lists are dropped as soon as a node is finished.
    struct Pending {
        std::int32_t id;
        int depth;
        std::vector<std::uint32_t> pixels;
    };
    std::deque<Pending> queue;
    tree.nodes.push_back(TreeNode{.id = 0, .depth = 0});
    tree.nodes[0].pixel_count = static_cast<std::uint32_t>(all.size());
    queue.push_back({0, 0, std::move(all)});

    while (!queue.empty()) {
        Pending node = std::move(queue.front());
        queue.pop_front();
        auto outcome = detail::train_node_impl(stack, node.pixels, params, rng, node.depth,
                                               scratch);
        if (outcome.is_leaf) {
            tree.nodes[node.id].stats = detail::compute_leaf_stats(stack, node.pixels);
            continue;
        }
        const std::int32_t left_id = static_cast<std::int32_t>(tree.nodes.size());
        const std::int32_t right_id = left_id + 1;
        auto& parent = tree.nodes[node.id];
        parent.split = outcome.split;
        parent.score = outcome.score;
        parent.lambda_used = outcome.lambda_used;
        parent.left = left_id;
        parent.right = right_id;
        tree.nodes.push_back(TreeNode{.id = left_id, .depth = node.depth + 1});
        tree.nodes.push_back(TreeNode{.id = right_id, .depth = node.depth + 1});
        tree.nodes[left_id].pixel_count = static_cast<std::uint32_t>(outcome.left_pixels.size());
        tree.nodes[right_id].pixel_count = static_cast<std::uint32_t>(outcome.right_pixels.size());
        queue.push_back({left_id, node.depth + 1, std::move(outcome.left_pixels)});
        queue.push_back({right_id, node.depth + 1, std::move(outcome.right_pixels)});
    }
    return tree;
}

/// Trains T trees; tree t is seeded with master_seed XOR t, so the forest is
/// a pure function of (stack, params) regardless of `jobs`.
inline Forest train_forest(const ChannelStack& stack, const TrainParams& params, int jobs = 0,
                           const CoherencySumFn& coherency = {}) {
    params.validate();
    Forest forest;
    forest.params = params;
    forest.height = stack.height();
    forest.width = stack.width();
    forest.channels = stack.channels();
    forest.trees.resize(params.tree_count);
    parallel_for(params.tree_count, jobs, [&](int t) {
        forest.trees[t] = train_tree(stack, params, params.master_seed ^ static_cast<std::uint64_t>(t),
                                     coherency);
    });
    return forest;
}

/// Id of the leaf that pixel (r, c) reaches.
inline std::int32_t route_leaf(const Tree& tree, const ChannelStack& stack, int r, int c) {
    std::int32_t id = 0;
    while (!tree.nodes[id].is_leaf()) {
        const auto& node = tree.nodes[id];
        id = detail::feature_value_unchecked(*node.split, stack, r, c) < node.split->threshold
                 ? node.left
                 : node.right;
    }
    return id;
}

/// Appends the ids of every node on the root-to-leaf path of (r, c).
inline void route_path(const Tree& tree, const ChannelStack& stack, int r, int c,
                       std::vector<std::int32_t>& path) {
    path.clear();
    std::int32_t id = 0;
    path.push_back(id);
    while (!tree.nodes[id].is_leaf()) {
        const auto& node = tree.nodes[id];
        id = detail::feature_value_unchecked(*node.split, stack, r, c) < node.split->threshold
                 ? node.left
                 : node.right;
        path.push_back(id);
    }
}

inline void check_routable(const Tree& tree, const ChannelStack& stack) {
    if (tree.trained_height != stack.height() || tree.trained_width != stack.width() ||
        tree.trained_channels != stack.channels())
        throw std::invalid_argument("tree/stack dimension mismatch");
}

/// Per-pixel leaf ids of one tree (the tree's segmentation of the image).
inline SegmentationMap leaf_segmentation(const Tree& tree, const ChannelStack& stack) {
    check_routable(tree, stack);
    SegmentationMap seg(stack.height(), stack.width());
    for (int r = 0; r < stack.height(); ++r)
        for (int c = 0; c < stack.width(); ++c) seg(r, c) = route_leaf(tree, stack, r, c);
    return seg;
}

}  // namespace scrf
