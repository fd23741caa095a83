#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "scrf/integral.hpp"
#include "scrf/split.hpp"

namespace scrf {

/// Counts every coherency evaluation (both the standalone op and the
/// trainer's fast path). Lets tests prove the term is never computed when
/// the spatial weight is zero.
inline std::atomic<std::uint64_t>& coherency_eval_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

/// Sum over node pixels p of C(f,p) = (# same-side pixels in the window of
/// side 2*radius+1 around p) / (2*radius+1)^2. The pixel counts itself;
/// NotAtNode pixels never count; the denominator stays full-window even where
/// the window leaves the image. Computed with one integral image per side.
inline double coherency_sum(const AssignmentMap& assignment, int radius) {
    if (radius < 0) throw std::invalid_argument("coherency_sum: negative radius");
    const int H = assignment.height(), W = assignment.width();
    BinaryMap left(H, W, 0), right(H, W, 0);
    bool any = false;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            PixelState s = assignment.state(r, c);
            if (s == PixelState::Left) left(r, c) = 1, any = true;
            else if (s == PixelState::Right) right(r, c) = 1, any = true;
        }
    if (!any) throw std::invalid_argument("coherency_sum: no pixels at node");
    coherency_eval_count().fetch_add(1, std::memory_order_relaxed);

    IntegralImage li(left), ri(right);
    const double denom = static_cast<double>(2 * radius + 1) * (2 * radius + 1);
    double sum = 0.0;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            PixelState s = assignment.state(r, c);
            if (s == PixelState::NotAtNode) continue;
            const IntegralImage& same = (s == PixelState::Left) ? li : ri;
            sum += box_count(same, r, c, radius) / denom;
        }
    return sum;
}

/// Reusable buffers for evaluating the coherency sum of many candidate splits
/// of one node. Works on the node's bounding box (expanded by the window
/// radius) instead of the whole image; exact, since pixels outside the box
/// are never at the node.
class CoherencyScratch {
public:
    void begin_node(std::span<const std::uint32_t> pixels, int image_height, int image_width,
                    int radius) {
        image_width_ = image_width;
        radius_ = radius;
        int r0 = image_height, r1 = -1, c0 = image_width, c1 = -1;
        for (std::uint32_t idx : pixels) {
            const int r = static_cast<int>(idx) / image_width;
            const int c = static_cast<int>(idx) % image_width;
            r0 = std::min(r0, r); r1 = std::max(r1, r);
            c0 = std::min(c0, c); c1 = std::max(c1, c);
        }
        box_r0_ = std::max(0, r0 - radius);
        box_c0_ = std::max(0, c0 - radius);
        box_h_ = std::min(image_height - 1, r1 + radius) - box_r0_ + 1;
        box_w_ = std::min(image_width - 1, c1 + radius) - box_c0_ + 1;
        left_.assign(static_cast<std::size_t>(box_h_) * box_w_, 0);
        right_.assign(static_cast<std::size_t>(box_h_) * box_w_, 0);
    }

    /// `sides[i]` nonzero routes pixels[i] left. Returns the Eq. 7 sum for
    /// this candidate.
    double eval(std::span<const std::uint32_t> pixels, std::span<const std::uint8_t> sides) {
        coherency_eval_count().fetch_add(1, std::memory_order_relaxed);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            (sides[i] ? left_ : right_)[local_index(pixels[i])] = 1;
        }
        left_ii_.rebuild(left_.data(), box_h_, box_w_, box_w_);
        right_ii_.rebuild(right_.data(), box_h_, box_w_, box_w_);

        const double denom = static_cast<double>(2 * radius_ + 1) * (2 * radius_ + 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const std::size_t li = local_index(pixels[i]);
            const int lr = static_cast<int>(li) / box_w_;
            const int lc = static_cast<int>(li) % box_w_;
            const IntegralImage& same = sides[i] ? left_ii_ : right_ii_;
            sum += box_count(same, lr, lc, radius_) / denom;
        }
        // clear only the touched pixels for the next candidate
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            const std::size_t li = local_index(pixels[i]);
            left_[li] = 0;
            right_[li] = 0;
        }
        return sum;
    }

private:
    std::size_t local_index(std::uint32_t image_idx) const {
        const int r = static_cast<int>(image_idx) / image_width_ - box_r0_;
        const int c = static_cast<int>(image_idx) % image_width_ - box_c0_;
        return static_cast<std::size_t>(r) * box_w_ + c;
    }

    int image_width_ = 0, radius_ = 0;
    int box_r0_ = 0, box_c0_ = 0, box_h_ = 0, box_w_ = 0;
    std::vector<std::uint8_t> left_, right_;
    IntegralImage left_ii_, right_ii_;
};

}  // namespace scrf
