#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "scrf/affinity.hpp"
#include "scrf/grid.hpp"

namespace scrf {

constexpr double kGridEdgeWeight = 1e-4;  // weak 4-neighbor ties for connectivity

namespace detail {

/// Plain Lloyd k-means with seeded Forgy starts; returns labels of the best
/// run by inertia.
inline std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                               int restarts = 50, int iterations = 100) {
    const int n = static_cast<int>(points.rows());
    const int dim = static_cast<int>(points.cols());
    std::mt19937_64 rng(seed);
    std::vector<int> best_labels(n, 0);
    double best_inertia = std::numeric_limits<double>::infinity();

    std::vector<int> labels(n);
    Eigen::MatrixXd centers(k, dim);
    for (int rep = 0; rep < restarts; ++rep) {
        // Forgy init: k distinct rows
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (int j = 0; j < k; ++j) centers.row(j) = points.row(order[j]);

        for (int it = 0; it < iterations; ++it) {
            bool moved = false;
            for (int i = 0; i < n; ++i) {
                int arg = 0;
                double best = (points.row(i) - centers.row(0)).squaredNorm();
                for (int j = 1; j < k; ++j) {
                    const double d = (points.row(i) - centers.row(j)).squaredNorm();
                    if (d < best) {
                        best = d;
                        arg = j;
                    }
                }
                if (it == 0 || labels[i] != arg) moved = true;
                labels[i] = arg;
            }
            if (!moved) break;
            centers.setZero();
            std::vector<int> counts(k, 0);
            for (int i = 0; i < n; ++i) {
                centers.row(labels[i]) += points.row(i);
                ++counts[labels[i]];
            }
            for (int j = 0; j < k; ++j)
                if (counts[j] > 0) centers.row(j) /= counts[j];
        }
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) inertia += (points.row(i) - centers.row(labels[i])).squaredNorm();
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_labels = labels;
        }
    }
    return best_labels;
}

}  // namespace detail

/// Normalized-cut style segmentation: symmetric normalization of the affinity
/// matrix, top-K eigenvectors, unit-normalized rows, k-means. Weak 4-neighbor
/// grid edges are added so the pixel graph is connected.
inline SegmentationMap spectral_segment(const AffinityGraph& graph, int k,
                                        std::uint64_t seed = 0) {
    const int n = graph.node_count();
    if (k < 2) throw std::invalid_argument("spectral_segment: k must be >= 2");
    if (k > n) throw std::invalid_argument("spectral_segment: k exceeds node count");

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j, w] : graph.edges) {
        W(i, j) = std::max(W(i, j), w);
        W(j, i) = W(i, j);
    }
    const int gw = graph.width;
    for (int r = 0; r < graph.height; ++r)
        for (int c = 0; c < gw; ++c) {
            const int i = r * gw + c;
            if (c + 1 < gw) {
                W(i, i + 1) = std::max(W(i, i + 1), kGridEdgeWeight);
                W(i + 1, i) = W(i, i + 1);
            }
            if (r + 1 < graph.height) {
                W(i, i + gw) = std::max(W(i, i + gw), kGridEdgeWeight);
                W(i + gw, i) = W(i, i + gw);
            }
        }

    Eigen::VectorXd deg = W.rowwise().sum();
    Eigen::VectorXd dinv = deg.unaryExpr(
        [](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
    Eigen::MatrixXd Wn = dinv.asDiagonal() * W * dinv.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Wn);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_segment: eigendecomposition failed");
    // eigenvalues ascend; embed on the top-k eigenvectors
    Eigen::MatrixXd embed = solver.eigenvectors().rightCols(k);
    for (int i = 0; i < n; ++i) {
        const double norm = embed.row(i).norm();
        if (norm > 0.0) embed.row(i) /= norm;
    }

    std::vector<int> labels = detail::kmeans(embed, k, seed);
    SegmentationMap seg(graph.height, graph.width);
    for (int r = 0; r < graph.height; ++r)
        for (int c = 0; c < gw; ++c) seg(r, c) = labels[r * gw + c];
    return seg;
}

}  // namespace scrf
