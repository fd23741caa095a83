#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scrf/contour.hpp"
#include "scrf/errors.hpp"
#include "scrf/grid.hpp"

namespace scrf {

constexpr double kDefaultMatchTolerance = 0.0075;  // fraction of the image diagonal

/// Zhang-Suen morphological thinning; reduces thick boundary blobs to
/// 1-pixel-wide skeletons while preserving connectivity.
inline BinaryMap thin(const BinaryMap& map) {
    const int H = map.height(), W = map.width();
    BinaryMap img = map;
    for (auto& v : img) v = v ? 1 : 0;

    auto neighbors = [&](int r, int c, std::uint8_t p[8]) {
        // clockwise from north: P2..P9 in the classic notation
        static constexpr int off[8][2] = {{-1, 0}, {-1, 1}, {0, 1},  {1, 1},
                                          {1, 0},  {1, -1}, {0, -1}, {-1, -1}};
        for (int i = 0; i < 8; ++i) {
            const int rr = r + off[i][0], cc = c + off[i][1];
            p[i] = (rr >= 0 && rr < H && cc >= 0 && cc < W) ? img(rr, cc) : 0;
        }
    };

    bool changed = true;
    std::vector<std::pair<int, int>> to_clear;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            to_clear.clear();
            for (int r = 0; r < H; ++r)
                for (int c = 0; c < W; ++c) {
                    if (!img(r, c)) continue;
                    std::uint8_t p[8];
                    neighbors(r, c, p);
                    const int b = p[0] + p[1] + p[2] + p[3] + p[4] + p[5] + p[6] + p[7];
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    for (int i = 0; i < 8; ++i)
                        if (!p[i] && p[(i + 1) % 8]) ++a;
                    if (a != 1) continue;
                    if (pass == 0) {
                        if (p[0] && p[2] && p[4]) continue;
                        if (p[2] && p[4] && p[6]) continue;
                    } else {
                        if (p[0] && p[2] && p[6]) continue;
                        if (p[0] && p[4] && p[6]) continue;
                    }
                    to_clear.emplace_back(r, c);
                }
            for (auto [r, c] : to_clear) img(r, c) = 0;
            if (!to_clear.empty()) changed = true;
        }
    }
    return img;
}

struct MatchResult {
    double precision = 1.0;
    double recall = 0.0;
    // Raw counts for dataset-level aggregation.
    std::uint64_t matched_pred = 0;  // predicted pixels matched in any truth map
    std::uint64_t pred_total = 0;
    std::uint64_t matched_truth = 0;  // summed over truth maps
    std::uint64_t truth_total = 0;    // summed over truth maps

    double f_measure() const {
        return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
};

namespace detail {

struct PixelList {
    std::vector<int> rows, cols;
};

inline PixelList collect(const BinaryMap& map) {
    PixelList out;
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c)
            if (map(r, c)) {
                out.rows.push_back(r);
                out.cols.push_back(c);
            }
    return out;
}

}  // namespace detail

/// Greedy tolerance matcher. The predicted map is thinned, then matched
/// against each truth map with each truth pixel consumable once per map;
/// pairs are taken nearest-first within radius tolerance * image diagonal.
/// Precision counts predicted pixels matched in at least one truth map;
/// recall averages matched-truth fractions over the maps. An empty
/// prediction scores precision 1 by convention.
inline MatchResult match_boundaries(const BinaryMap& predicted,
                                    std::span<const BinaryMap> truths,
                                    double tolerance = kDefaultMatchTolerance) {
    if (truths.empty()) throw std::invalid_argument("match_boundaries: no truth maps");
    if (tolerance <= 0.0) throw std::invalid_argument("match_boundaries: tolerance must be > 0");
    for (const BinaryMap& t : truths)
        if (t.height() != predicted.height() || t.width() != predicted.width())
            throw std::invalid_argument("match_boundaries: dimension mismatch");

    const BinaryMap pred = thin(predicted);
    const detail::PixelList pl = detail::collect(pred);
    const std::size_t np = pl.rows.size();
    const double diag = std::hypot(static_cast<double>(pred.height()),
                                   static_cast<double>(pred.width()));
    const double radius = tolerance * diag;
    const int window = static_cast<int>(std::floor(radius));

    MatchResult res;
    res.pred_total = np;
    std::vector<std::uint8_t> pred_matched_any(np, 0);

    double recall_sum = 0.0;
    for (const BinaryMap& truth : truths) {
        const detail::PixelList tl = detail::collect(truth);
        res.truth_total += tl.rows.size();

        // candidate pairs within the tolerance radius, nearest first
        struct Pair {
            double d2;
            std::uint32_t pi, ti;
        };
        std::vector<Pair> pairs;
        // bucket truth pixels by row for windowed lookup
        std::vector<std::vector<std::uint32_t>> by_row(truth.height());
        for (std::uint32_t ti = 0; ti < tl.rows.size(); ++ti)
            by_row[tl.rows[ti]].push_back(ti);
        for (std::uint32_t pi = 0; pi < np; ++pi) {
            const int pr = pl.rows[pi], pc = pl.cols[pi];
            for (int r = std::max(0, pr - window); r <= std::min(truth.height() - 1, pr + window);
                 ++r)
                for (std::uint32_t ti : by_row[r]) {
                    const double dy = pr - tl.rows[ti], dx = pc - tl.cols[ti];
                    const double d2 = dy * dy + dx * dx;
                    if (d2 <= radius * radius) pairs.push_back({d2, pi, ti});
                }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.d2 != b.d2) return a.d2 < b.d2;
            if (a.pi != b.pi) return a.pi < b.pi;
            return a.ti < b.ti;
        });
        std::vector<std::uint8_t> pm(np, 0), tm(tl.rows.size(), 0);
        std::uint64_t matched = 0;
        for (const Pair& p : pairs) {
            if (pm[p.pi] || tm[p.ti]) continue;
            pm[p.pi] = tm[p.ti] = 1;
            ++matched;
            pred_matched_any[p.pi] = 1;
        }
        res.matched_truth += matched;
        recall_sum += tl.rows.empty() ? 1.0
                                      : static_cast<double>(matched) /
                                            static_cast<double>(tl.rows.size());
    }

    for (std::uint8_t m : pred_matched_any) res.matched_pred += m;
    res.precision = np == 0 ? 1.0
                            : static_cast<double>(res.matched_pred) / static_cast<double>(np);
    res.recall = recall_sum / static_cast<double>(truths.size());
    return res;
}

struct ThresholdEntry {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
    MatchResult counts;
};

struct PRCurve {
    std::vector<ThresholdEntry> entries;  // strictly increasing thresholds
    double best_f = 0.0;                  // per-image optimum (OIS contribution)
    double best_f_recall = 0.0;           // recall at the best-F threshold
    double ap = 0.0;                      // trapezoidal area under P(R)
};

/// Sweeps `thresholds` evenly spaced levels t_k = k/(n+1) over a contour map
/// normalized to [0,1]; each level is binarized at v >= t, thinned, matched.
inline PRCurve pr_curve(const ContourMap& contour, std::span<const BinaryMap> truths,
                        int thresholds = 30, double tolerance = kDefaultMatchTolerance) {
    if (thresholds < 1) throw std::invalid_argument("pr_curve: thresholds must be >= 1");
    PRCurve curve;
    for (int k = 1; k <= thresholds; ++k) {
        const double t = static_cast<double>(k) / (thresholds + 1);
        BinaryMap pred(contour.height(), contour.width(), 0);
        for (int r = 0; r < contour.height(); ++r)
            for (int c = 0; c < contour.width(); ++c) pred(r, c) = contour(r, c) >= t ? 1 : 0;
        MatchResult m = match_boundaries(pred, truths, tolerance);
        ThresholdEntry e{t, m.precision, m.recall, m.f_measure(), m};
        if (e.f > curve.best_f) {
            curve.best_f = e.f;
            curve.best_f_recall = e.recall;
        }
        curve.entries.push_back(e);
    }
    // AP: trapezoid over the recall axis across observed operating points.
    std::vector<std::pair<double, double>> rp;
    for (const auto& e : curve.entries) rp.emplace_back(e.recall, e.precision);
    std::sort(rp.begin(), rp.end());
    for (std::size_t i = 1; i < rp.size(); ++i)
        curve.ap += (rp[i].first - rp[i - 1].first) * 0.5 * (rp[i].second + rp[i - 1].second);
    return curve;
}

struct DatasetSummary {
    double ods_f = 0.0;  // best F over thresholds of pooled counts
    double ois_f = 0.0;  // mean per-image best F
    double ap = 0.0;     // mean per-image AP
};

inline DatasetSummary dataset_summary(std::span<const PRCurve> curves) {
    if (curves.empty()) throw std::invalid_argument("dataset_summary: no curves");
    const std::size_t nthresh = curves.front().entries.size();
    for (const PRCurve& c : curves)
        if (c.entries.size() != nthresh)
            throw std::invalid_argument("dataset_summary: inconsistent threshold counts");

    DatasetSummary s;
    for (std::size_t k = 0; k < nthresh; ++k) {
        std::uint64_t mp = 0, tp = 0, mt = 0, tt = 0;
        for (const PRCurve& c : curves) {
            mp += c.entries[k].counts.matched_pred;
            tp += c.entries[k].counts.pred_total;
            mt += c.entries[k].counts.matched_truth;
            tt += c.entries[k].counts.truth_total;
        }
        const double P = tp == 0 ? 1.0 : static_cast<double>(mp) / static_cast<double>(tp);
        const double R = tt == 0 ? 1.0 : static_cast<double>(mt) / static_cast<double>(tt);
        const double F = P + R > 0.0 ? 2.0 * P * R / (P + R) : 0.0;
        s.ods_f = std::max(s.ods_f, F);
    }
    for (const PRCurve& c : curves) {
        s.ois_f += c.best_f;
        s.ap += c.ap;
    }
    s.ois_f /= static_cast<double>(curves.size());
    s.ap /= static_cast<double>(curves.size());
    return s;
}

/// CSV report: one row per threshold (pooled over images) plus a summary row.
inline void write_pr_report(const std::string& path, std::span<const PRCurve> curves,
                            const DatasetSummary& summary) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for write: " + path);
    os.precision(6);
    os << "threshold,precision,recall,f\n";
    const std::size_t nthresh = curves.empty() ? 0 : curves.front().entries.size();
    for (std::size_t k = 0; k < nthresh; ++k) {
        std::uint64_t mp = 0, tp = 0, mt = 0, tt = 0;
        for (const PRCurve& c : curves) {
            mp += c.entries[k].counts.matched_pred;
            tp += c.entries[k].counts.pred_total;
            mt += c.entries[k].counts.matched_truth;
            tt += c.entries[k].counts.truth_total;
        }
        const double P = tp == 0 ? 1.0 : static_cast<double>(mp) / static_cast<double>(tp);
        const double R = tt == 0 ? 1.0 : static_cast<double>(mt) / static_cast<double>(tt);
        const double F = P + R > 0.0 ? 2.0 * P * R / (P + R) : 0.0;
        os << curves.front().entries[k].threshold << "," << P << "," << R << "," << F << "\n";
    }
    os << "summary,ods=" << summary.ods_f << ",ois=" << summary.ois_f << ",ap=" << summary.ap
       << "\n";
}

}  // namespace scrf
