#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "scrf/binio.hpp"
#include "scrf/errors.hpp"
#include "scrf/grid.hpp"
#include "scrf/image.hpp"

namespace scrf {

/// Loads a PNG/PPM/JPEG raster as a 3-channel stack with values in [0,1].
/// Grayscale files are replicated to 3 channels.
inline ChannelStack load_image(const std::string& path) {
    if (!std::filesystem::exists(path)) throw io_error("no such file: " + path);
    cv::Mat img = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (img.empty()) throw format_error("unsupported or corrupt image: " + path);

    double scale;
    switch (img.depth()) {
        case CV_8U: scale = 255.0; break;
        case CV_16U: scale = 65535.0; break;
        default: throw format_error("unsupported bit depth: " + path);
    }
    cv::Mat f;
    img.convertTo(f, CV_64F, 1.0 / scale);

    ChannelStack out(f.rows, f.cols, 3);
    if (f.channels() == 1) {
        for (int r = 0; r < f.rows; ++r)
            for (int c = 0; c < f.cols; ++c) {
                double v = f.at<double>(r, c);
                out.at(r, c, 0) = out.at(r, c, 1) = out.at(r, c, 2) = v;
            }
    } else if (f.channels() == 3 || f.channels() == 4) {
        for (int r = 0; r < f.rows; ++r)
            for (int c = 0; c < f.cols; ++c) {
                const double* px = f.ptr<double>(r) + static_cast<std::size_t>(c) * f.channels();
                // OpenCV loads BGR(A).
                out.at(r, c, 0) = px[2];
                out.at(r, c, 1) = px[1];
                out.at(r, c, 2) = px[0];
            }
    } else {
        throw format_error("unsupported channel count: " + path);
    }
    return out;
}

/// Loads a grayscale image at full stored precision, scaled to [0,1].
inline Grid<double> load_gray(const std::string& path) {
    if (!std::filesystem::exists(path)) throw io_error("no such file: " + path);
    cv::Mat img = cv::imread(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_GRAYSCALE);
    if (img.empty()) throw format_error("unsupported or corrupt image: " + path);
    double scale = img.depth() == CV_16U ? 65535.0 : 255.0;
    Grid<double> out(img.rows, img.cols);
    for (int r = 0; r < img.rows; ++r)
        for (int c = 0; c < img.cols; ++c)
            out(r, c) = (img.depth() == CV_16U ? img.at<std::uint16_t>(r, c) : img.at<std::uint8_t>(r, c)) / scale;
    return out;
}

/// Writes a [0,1] map as 16-bit grayscale (format from the extension: .png or .pgm).
inline void save_gray16(const std::string& path, const Grid<double>& map) {
    cv::Mat img(map.height(), map.width(), CV_16UC1);
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c) {
            double v = std::clamp(map(r, c), 0.0, 1.0);
            img.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(std::lround(v * 65535.0));
        }
    if (!cv::imwrite(path, img)) throw io_error("cannot write: " + path);
}

inline void save_binary_png(const std::string& path, const BinaryMap& map) {
    cv::Mat img(map.height(), map.width(), CV_8UC1);
    for (int r = 0; r < map.height(); ++r)
        for (int c = 0; c < map.width(); ++c) img.at<std::uint8_t>(r, c) = map(r, c) ? 255 : 0;
    if (!cv::imwrite(path, img)) throw io_error("cannot write: " + path);
}

inline BinaryMap load_binary(const std::string& path) {
    Grid<double> g = load_gray(path);
    BinaryMap out(g.height(), g.width(), 0);
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c) out(r, c) = g(r, c) > 0.5 ? 1 : 0;
    return out;
}

/// Writes a label map as 16-bit grayscale PNG (labels stored verbatim).
inline void save_labels_png(const std::string& path, const SegmentationMap& seg) {
    cv::Mat img(seg.height(), seg.width(), CV_16UC1);
    for (int r = 0; r < seg.height(); ++r)
        for (int c = 0; c < seg.width(); ++c)
            img.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(seg(r, c));
    if (!cv::imwrite(path, img)) throw io_error("cannot write: " + path);
}

// ---- feature-stack cache ----------------------------------------------
// Header: magic "SCRF", u32 height, u32 width, u32 channels (little-endian),
// followed by row-major f64 values (channel index innermost).

inline void save_stack(const std::string& path, const ChannelStack& stack) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for write: " + path);
    detail::write_magic(os, "SCRF", 4);
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(stack.height()));
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(stack.width()));
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(stack.channels()));
    for (double v : stack.data()) detail::write_le<double>(os, v);
    if (!os) throw io_error("write failed: " + path);
}

inline ChannelStack load_stack(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    detail::expect_magic(is, "SCRF", 4);
    auto h = detail::read_le<std::uint32_t>(is);
    auto w = detail::read_le<std::uint32_t>(is);
    auto c = detail::read_le<std::uint32_t>(is);
    ChannelStack stack(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (double& v : stack.data()) v = detail::read_le<double>(is);
    return stack;
}

}  // namespace scrf
