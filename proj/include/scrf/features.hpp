#pragma once

#include "scrf/bilateral.hpp"
#include "scrf/color.hpp"
#include "scrf/image.hpp"

namespace scrf {

constexpr double kBilateralSigmaSpatial = 3.0;
constexpr double kBilateralRangeFraction = 0.1;

/// Builds the 6-channel training stack from an RGB image in [0,1]:
/// channels 0-2 are Lab, channels 3-5 the same Lab channels after bilateral
/// filtering (spatial sigma 3 px, range sigma 10% of the channel's attained
/// range). A channel with zero range is copied unchanged, which is what any
/// positive range sigma would produce on it.
inline ChannelStack build_feature_stack(const ChannelStack& rgb) {
    ChannelStack lab = rgb_to_lab(rgb);
    ChannelStack out(lab.height(), lab.width(), 6);
    for (int ch = 0; ch < 3; ++ch) out.set_channel(ch, lab.channel(ch));
    for (int ch = 0; ch < 3; ++ch) {
        auto [lo, hi] = lab.channel_range(ch);
        if (hi > lo) {
            out.set_channel(ch + 3, bilateral_filter_channel(lab, ch, kBilateralSigmaSpatial,
                                                             kBilateralRangeFraction * (hi - lo)));
        } else {
            out.set_channel(ch + 3, lab.channel(ch));
        }
    }
    return out;
}

}  // namespace scrf
