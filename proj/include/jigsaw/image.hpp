#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace jigsaw {

/// Interleaved 3-channel raster, row-major. Used both for 8-bit sRGB data and
/// for normalized L*a*b* faces.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3) {
        if (w < 0 || h < 0) {
            throw std::invalid_argument("negative image size");
        }
    }

    [[nodiscard]] std::size_t index(int y, int x, int band = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * 3 + band;
    }
    T& at(int y, int x, int band) { return data[index(y, x, band)]; }
    const T& at(int y, int x, int band) const { return data[index(y, x, band)]; }

    friend bool operator==(const Image&, const Image&) = default;
};

using RgbImage = Image<std::uint8_t>;
/// W x W x 3 tile in normalized L*a*b* (each band in [0,1]).
using FaceImage = Image<double>;

/// Rotates counterclockwise by `quarter_turns` * 90 degrees.
template <typename T>
Image<T> rotated_ccw(const Image<T>& src, int quarter_turns) {
    const int k = ((quarter_turns % 4) + 4) % 4;
    if (k == 0) {
        return src;
    }
    const bool swap = (k % 2) == 1;
    Image<T> out(swap ? src.height : src.width, swap ? src.width : src.height);
    const int w = src.width;
    const int h = src.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int ny = 0;
            int nx = 0;
            switch (k) {
                case 1: ny = w - 1 - x; nx = y; break;
                case 2: ny = h - 1 - y; nx = w - 1 - x; break;
                default: ny = x; nx = h - 1 - y; break;
            }
            for (int b = 0; b < 3; ++b) {
                out.at(ny, nx, b) = src.at(y, x, b);
            }
        }
    }
    return out;
}

/// Mirror about the vertical axis (left and right swap).
template <typename T>
Image<T> mirrored(const Image<T>& src) {
    Image<T> out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            for (int b = 0; b < 3; ++b) {
                out.at(y, src.width - 1 - x, b) = src.at(y, x, b);
            }
        }
    }
    return out;
}

template <typename T>
Image<T> cropped(const Image<T>& src, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || x0 + w > src.width || y0 + h > src.height) {
        throw std::out_of_range("crop window outside image");
    }
    Image<T> out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int b = 0; b < 3; ++b) {
                out.at(y, x, b) = src.at(y0 + y, x0 + x, b);
            }
        }
    }
    return out;
}

template <typename T>
void paste(Image<T>& dst, const Image<T>& tile, int x0, int y0) {
    for (int y = 0; y < tile.height; ++y) {
        for (int x = 0; x < tile.width; ++x) {
            for (int b = 0; b < 3; ++b) {
                dst.at(y0 + y, x0 + x, b) = tile.at(y, x, b);
            }
        }
    }
}

}  // namespace jigsaw
