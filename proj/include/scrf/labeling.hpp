#pragma once

#include <vector>

#include "scrf/grid.hpp"

namespace scrf {

/// Number of 4-connected regions of equal label in a segmentation.
inline int count_components(const SegmentationMap& seg) {
    const int H = seg.height(), W = seg.width();
    Grid<std::uint8_t> seen(H, W, 0);
    std::vector<std::pair<int, int>> stack;
    int components = 0;
    for (int r0 = 0; r0 < H; ++r0)
        for (int c0 = 0; c0 < W; ++c0) {
            if (seen(r0, c0)) continue;
            ++components;
            const std::int32_t label = seg(r0, c0);
            stack.clear();
            stack.emplace_back(r0, c0);
            seen(r0, c0) = 1;
            while (!stack.empty()) {
                auto [r, c] = stack.back();
                stack.pop_back();
                constexpr int d[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
                for (const auto& dd : d) {
                    const int rr = r + dd[0], cc = c + dd[1];
                    if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
                    if (seen(rr, cc) || seg(rr, cc) != label) continue;
                    seen(rr, cc) = 1;
                    stack.emplace_back(rr, cc);
                }
            }
        }
    return components;
}

}  // namespace scrf
