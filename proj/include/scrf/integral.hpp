#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "scrf/grid.hpp"

namespace scrf {

/// Summed-area table of a binary indicator map. entry(i, j) is the count of
/// 1-pixels in the half-open rectangle [0,i) x [0,j); row 0 and column 0 are
/// zero. Supports in-place rebuilds so training can reuse one table.
class IntegralImage {
public:
    IntegralImage() = default;

    explicit IntegralImage(const BinaryMap& indicator) { rebuild(indicator); }

    void rebuild(const BinaryMap& indicator) {
        rebuild(indicator.data(), indicator.height(), indicator.width(), indicator.width());
    }

    /// Rebuilds from a row-major buffer with arbitrary row stride; nonzero
    /// bytes count as 1.
    void rebuild(const std::uint8_t* data, int height, int width, int stride) {
        height_ = height;
        width_ = width;
        table_.assign(static_cast<std::size_t>(height + 1) * (width + 1), 0);
        for (int r = 0; r < height; ++r) {
            std::int32_t row_sum = 0;
            const std::uint8_t* src = data + static_cast<std::size_t>(r) * stride;
            const std::int32_t* prev = &table_[static_cast<std::size_t>(r) * (width_ + 1)];
            std::int32_t* cur = &table_[static_cast<std::size_t>(r + 1) * (width_ + 1)];
            for (int c = 0; c < width; ++c) {
                row_sum += src[c] ? 1 : 0;
                cur[c + 1] = prev[c + 1] + row_sum;
            }
        }
    }

    int height() const { return height_; }
    int width() const { return width_; }

    std::int32_t entry(int i, int j) const {
        return table_[static_cast<std::size_t>(i) * (width_ + 1) + j];
    }

    /// Count of 1-pixels in the rectangle [r0,r1) x [c0,c1), clipped to the image.
    std::int32_t rect_count(int r0, int c0, int r1, int c1) const {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, height_);
        c1 = std::min(c1, width_);
        if (r0 >= r1 || c0 >= c1) return 0;
        return entry(r1, c1) - entry(r0, c1) - entry(r1, c0) + entry(r0, c0);
    }

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::int32_t> table_;
};

inline IntegralImage build_integral(const BinaryMap& indicator) {
    return IntegralImage(indicator);
}

/// Count of 1-pixels in the square window of side 2*radius+1 centered at
/// (r, c), intersected with the image.
inline std::int32_t box_count(const IntegralImage& ii, int r, int c, int radius) {
    return ii.rect_count(r - radius, c - radius, r + radius + 1, c + radius + 1);
}

}  // namespace scrf
