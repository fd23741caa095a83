#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "scrf/binio.hpp"
#include "scrf/errors.hpp"
#include "scrf/forest.hpp"

namespace scrf {

// Forest model file, format version 1. Little-endian throughout.
//
//   "SCRFMODL"  magic
//   u32         format version
//   u8          plain-RF flag (no spatial term anywhere in the model)
//   TrainParams u32 tree_count, max_depth, candidates, min_leaf,
//               split_patch_radius, coherency_radius; u8 lambda_mode;
//               f64 lambda, lambda_mean, lambda_std; u64 master_seed
//   u32 x3      trained height, width, channels
//   per tree:   u64 seed, u32 node count, then nodes in breadth-first order:
//               u32 id, u32 depth, u8 leaf flag, then either the split record
//               (u8 kind, u32 channel, i32 dy1 dx1 dy2 dx2, f64 bias,
//               f64 threshold, i32 left id, i32 right id) or the leaf record
//               (f64 mean, f64 variance per channel).

constexpr std::uint32_t kModelFormatVersion = 1;

inline void save_forest(std::ostream& os, const Forest& forest) {
    using namespace detail;
    write_magic(os, "SCRFMODL", 8);
    write_le<std::uint32_t>(os, kModelFormatVersion);
    write_le<std::uint8_t>(os, forest.params.is_plain_rf() ? 1 : 0);

    const TrainParams& p = forest.params;
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.tree_count));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.max_depth));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.candidates_per_node));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.min_leaf_pixels));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.split_patch_radius));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.coherency_radius));
    write_le<std::uint8_t>(os, static_cast<std::uint8_t>(p.lambda_mode));
    write_le<double>(os, p.lambda);
    write_le<double>(os, p.lambda_mean);
    write_le<double>(os, p.lambda_std);
    write_le<std::uint64_t>(os, p.master_seed);

    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(forest.height));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(forest.width));
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(forest.channels));

    for (const Tree& tree : forest.trees) {
        write_le<std::uint64_t>(os, tree.seed);
        write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tree.nodes.size()));
        for (const TreeNode& node : tree.nodes) {
            write_le<std::uint32_t>(os, static_cast<std::uint32_t>(node.id));
            write_le<std::uint32_t>(os, static_cast<std::uint32_t>(node.depth));
            write_le<std::uint8_t>(os, node.is_leaf() ? 1 : 0);
            if (!node.is_leaf()) {
                const SplitFunction& sf = *node.split;
                write_le<std::uint8_t>(os, static_cast<std::uint8_t>(sf.kind));
                write_le<std::uint32_t>(os, static_cast<std::uint32_t>(sf.channel));
                write_le<std::int32_t>(os, sf.dy1);
                write_le<std::int32_t>(os, sf.dx1);
                write_le<std::int32_t>(os, sf.dy2);
                write_le<std::int32_t>(os, sf.dx2);
                write_le<double>(os, sf.bias);
                write_le<double>(os, sf.threshold);
                write_le<std::int32_t>(os, node.left);
                write_le<std::int32_t>(os, node.right);
            } else {
                for (int ch = 0; ch < forest.channels; ++ch) {
                    write_le<double>(os, node.stats.mean[ch]);
                    write_le<double>(os, node.stats.variance[ch]);
                }
            }
        }
    }
    if (!os) throw io_error("model write failed");
}

inline Forest load_forest(std::istream& is) {
    using namespace detail;
    expect_magic(is, "SCRFMODL", 8);
    const auto version = read_le<std::uint32_t>(is);
    if (version != kModelFormatVersion) throw format_error("unsupported model format version");
    read_le<std::uint8_t>(is);  // plain-RF flag, derivable from params

    Forest forest;
    TrainParams& p = forest.params;
    p.tree_count = static_cast<int>(read_le<std::uint32_t>(is));
    p.max_depth = static_cast<int>(read_le<std::uint32_t>(is));
    p.candidates_per_node = static_cast<int>(read_le<std::uint32_t>(is));
    p.min_leaf_pixels = static_cast<int>(read_le<std::uint32_t>(is));
    p.split_patch_radius = static_cast<int>(read_le<std::uint32_t>(is));
    p.coherency_radius = static_cast<int>(read_le<std::uint32_t>(is));
    p.lambda_mode = static_cast<LambdaMode>(read_le<std::uint8_t>(is));
    p.lambda = read_le<double>(is);
    p.lambda_mean = read_le<double>(is);
    p.lambda_std = read_le<double>(is);
    p.master_seed = read_le<std::uint64_t>(is);

    forest.height = static_cast<int>(read_le<std::uint32_t>(is));
    forest.width = static_cast<int>(read_le<std::uint32_t>(is));
    forest.channels = static_cast<int>(read_le<std::uint32_t>(is));

    forest.trees.resize(p.tree_count);
    for (Tree& tree : forest.trees) {
        tree.trained_height = forest.height;
        tree.trained_width = forest.width;
        tree.trained_channels = forest.channels;
        tree.seed = read_le<std::uint64_t>(is);
        const auto node_count = read_le<std::uint32_t>(is);
        tree.nodes.resize(node_count);
        for (std::uint32_t i = 0; i < node_count; ++i) {
            TreeNode& node = tree.nodes[i];
            node.id = static_cast<std::int32_t>(read_le<std::uint32_t>(is));
            node.depth = static_cast<std::int32_t>(read_le<std::uint32_t>(is));
            const bool leaf = read_le<std::uint8_t>(is) != 0;
            if (!leaf) {
                SplitFunction sf;
                sf.kind = static_cast<SplitKind>(read_le<std::uint8_t>(is));
                sf.channel = static_cast<std::int32_t>(read_le<std::uint32_t>(is));
                sf.dy1 = read_le<std::int32_t>(is);
                sf.dx1 = read_le<std::int32_t>(is);
                sf.dy2 = read_le<std::int32_t>(is);
                sf.dx2 = read_le<std::int32_t>(is);
                sf.bias = read_le<double>(is);
                sf.threshold = read_le<double>(is);
                node.split = sf;
                node.left = read_le<std::int32_t>(is);
                node.right = read_le<std::int32_t>(is);
            } else {
                node.stats.mean.resize(forest.channels);
                node.stats.variance.resize(forest.channels);
                for (int ch = 0; ch < forest.channels; ++ch) {
                    node.stats.mean[ch] = read_le<double>(is);
                    node.stats.variance[ch] = read_le<double>(is);
                }
            }
        }
    }
    return forest;
}

inline void save_forest(const std::string& path, const Forest& forest) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for write: " + path);
    save_forest(os, forest);
}

inline Forest load_forest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    return load_forest(is);
}

/// Model bytes in memory; handy for byte-identity assertions.
inline std::string serialize_forest(const Forest& forest) {
    std::ostringstream os(std::ios::binary);
    save_forest(os, forest);
    return os.str();
}

}  // namespace scrf
