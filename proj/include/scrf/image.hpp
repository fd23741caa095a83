#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scrf/grid.hpp"

namespace scrf {

/// H x W x C stack of real-valued image channels, stored row-major with the
/// channel index innermost: index = (r * width + c) * channels + ch. This is
/// also the layout of the on-disk stack cache.
class ChannelStack {
public:
    ChannelStack() = default;
    ChannelStack(int height, int width, int channels, double fill = 0.0)
        : height_(height), width_(width), channels_(channels),
          data_(static_cast<std::size_t>(height) * width * channels, fill) {
        if (height < 1 || width < 1 || channels < 1)
            throw std::invalid_argument("ChannelStack: dimensions must be >= 1");
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

    double& at(int r, int c, int ch) { return data_[index(r, c, ch)]; }
    double at(int r, int c, int ch) const { return data_[index(r, c, ch)]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Attained [min, max] of one channel.
    std::pair<double, double> channel_range(int ch) const {
        double lo = at(0, 0, ch), hi = lo;
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c) {
                double v = at(r, c, ch);
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
        return {lo, hi};
    }

    std::vector<std::pair<double, double>> channel_ranges() const {
        std::vector<std::pair<double, double>> out;
        out.reserve(channels_);
        for (int ch = 0; ch < channels_; ++ch) out.push_back(channel_range(ch));
        return out;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Grid<double> channel(int ch) const {
        Grid<double> g(height_, width_);
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c) g(r, c) = at(r, c, ch);
        return g;
    }

    void set_channel(int ch, const Grid<double>& g) {
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < width_; ++c) at(r, c, ch) = g(r, c);
    }

    friend bool operator==(const ChannelStack& a, const ChannelStack& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.channels_ == b.channels_ &&
               a.data_ == b.data_;
    }

private:
    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width_ + c) * channels_ + ch;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// Replicates a single-channel stack into `copies` identical channels
/// (grayscale -> pseudo-RGB before color conversion).
inline ChannelStack replicate_channels(const ChannelStack& mono, int copies) {
    if (mono.channels() != 1) throw std::invalid_argument("replicate_channels: input must have 1 channel");
    ChannelStack out(mono.height(), mono.width(), copies);
    for (int r = 0; r < mono.height(); ++r)
        for (int c = 0; c < mono.width(); ++c)
            for (int ch = 0; ch < copies; ++ch) out.at(r, c, ch) = mono.at(r, c, 0);
    return out;
}

}  // namespace scrf
