// Minimal RGB PNG writer on top of zlib, plus a tiny raster canvas for the
// plot conveniences (scatter panels, basin rasters). CSV files carry the
// data contract; these images are purely for eyeballing.
#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace veblen {

namespace detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

inline void write_png_rgb(const std::string& path, std::size_t width, std::size_t height,
                          const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != width * height * 3) throw std::invalid_argument("write_png_rgb: bad buffer size");

    // Raw scanlines, each prefixed with filter byte 0.
    std::vector<std::uint8_t> raw((width * 3 + 1) * height);
    for (std::size_t y = 0; y < height; ++y) {
        raw[y * (width * 3 + 1)] = 0;
        std::memcpy(&raw[y * (width * 3 + 1) + 1], &rgb[y * width * 3], width * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> zdata(bound);
    if (compress2(zdata.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw std::runtime_error("write_png_rgb: deflate failed");
    zdata.resize(bound);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    detail::put_be32(ihdr, static_cast<std::uint32_t>(width));
    detail::put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // colour type: truecolour
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    detail::put_chunk(png, "IHDR", ihdr);
    detail::put_chunk(png, "IDAT", zdata);
    detail::put_chunk(png, "IEND", {});

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const std::size_t written = std::fwrite(png.data(), 1, png.size(), f);
    std::fclose(f);
    if (written != png.size()) throw std::runtime_error("error writing " + path);
}

struct Rgb {
    std::uint8_t r, g, b;
};

class Canvas {
public:
    Canvas(std::size_t width, std::size_t height, Rgb background = {255, 255, 255})
        : width_(width), height_(height), px_(width * height * 3) {
        for (std::size_t i = 0; i < width_ * height_; ++i) set_index(i, background);
    }

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }

    void set(std::size_t x, std::size_t y, Rgb c) {
        if (x < width_ && y < height_) set_index(y * width_ + x, c);
    }

    // Data point -> pixel, y axis pointing up.
    void plot(double x, double y, double x_lo, double x_hi, double y_lo, double y_hi, Rgb c) {
        if (!(x_hi > x_lo) || !(y_hi > y_lo)) return;
        const double fx = (x - x_lo) / (x_hi - x_lo);
        const double fy = (y - y_lo) / (y_hi - y_lo);
        if (fx < 0.0 || fx > 1.0 || fy < 0.0 || fy > 1.0) return;
        const auto px = static_cast<std::size_t>(fx * static_cast<double>(width_ - 1) + 0.5);
        const auto py = static_cast<std::size_t>((1.0 - fy) * static_cast<double>(height_ - 1) + 0.5);
        set(px, py, c);
    }

    void save(const std::string& path) const { write_png_rgb(path, width_, height_, px_); }

private:
    void set_index(std::size_t i, Rgb c) {
        px_[3 * i] = c.r;
        px_[3 * i + 1] = c.g;
        px_[3 * i + 2] = c.b;
    }

    std::size_t width_, height_;
    std::vector<std::uint8_t> px_;
};

}  // namespace veblen
