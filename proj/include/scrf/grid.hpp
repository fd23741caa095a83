#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scrf {

/// Dense row-major 2-D buffer. Most maps in this library (assignments,
/// edge indicators, contours, segment labels) are Grid instantiations.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, T fill = T{})
        : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width, fill) {
        if (height < 0 || width < 0) throw std::invalid_argument("Grid: negative dimensions");
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * width_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * width_ + c]; }

    T& at(int r, int c) {
        check(r, c);
        return (*this)(r, c);
    }
    const T& at(int r, int c) const {
        check(r, c);
        return (*this)(r, c);
    }

    bool contains(int r, int c) const { return r >= 0 && r < height_ && c >= 0 && c < width_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

    bool same_shape(const Grid& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.data_ == b.data_;
    }

private:
    void check(int r, int c) const {
        if (!contains(r, c)) throw std::out_of_range("Grid: index out of range");
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<T> data_;
};

using BinaryMap = Grid<std::uint8_t>;
using SegmentationMap = Grid<std::int32_t>;

}  // namespace scrf
