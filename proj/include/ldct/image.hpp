#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldct {

/// Clinical 12-bit CT range used whenever HU values are mapped onto the
/// network's tanh range.
constexpr double kHuMin = -1024.0;
constexpr double kHuMax = 3071.0;

/// Single-channel raster. Values are HU for clinical-style images or
/// linear attenuation (1/mm) for phantom-mode simulation inputs.
struct Image2D {
    int width = 0;
    int height = 0;
    double pixel_spacing = 1.0; // mm per pixel
    std::vector<float> data;    // row-major, height rows of width

    Image2D() = default;
    Image2D(int w, int h, double spacing, float fill = 0.0f)
        : width(w), height(h), pixel_spacing(spacing),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("Image2D: non-positive dimensions");
        if (!(spacing > 0.0)) throw std::invalid_argument("Image2D: pixel_spacing must be > 0");
    }

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }

    bool same_shape(const Image2D& o) const { return width == o.width && height == o.height; }

    void validate() const {
        if (width <= 0 || height <= 0) throw std::invalid_argument("Image2D: non-positive dimensions");
        if (!(pixel_spacing > 0.0)) throw std::invalid_argument("Image2D: pixel_spacing must be > 0");
        if (data.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("Image2D: data length does not match width*height");
        for (float v : data)
            if (!std::isfinite(v)) throw std::invalid_argument("Image2D: non-finite pixel value");
    }
};

/// 8-bit rendering produced by apply_window.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Display window, e.g. abdomen {level 40, width 400}.
struct Window {
    double level = 40.0;
    double width = 400.0;
};

struct RoiRect {
    int x0 = 0;
    int y0 = 0;
    int w = 1;
    int h = 1;

    bool inside(const Image2D& img) const {
        return x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 &&
               x0 + w <= img.width && y0 + h <= img.height;
    }
};

/// Linear map of [level-width/2, level+width/2] onto [0,255], clamped.
/// Rounds half away from zero so golden files are stable across platforms.
inline Image8 apply_window(const Image2D& img, const Window& win) {
    if (!(win.width > 0.0)) throw std::invalid_argument("apply_window: window width must be > 0");
    const double lo = win.level - win.width / 2.0;
    Image8 out;
    out.width = img.width;
    out.height = img.height;
    out.data.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        double t = (static_cast<double>(img.data[i]) - lo) / win.width * 255.0;
        t = std::clamp(t, 0.0, 255.0);
        out.data[i] = static_cast<std::uint8_t>(std::lround(t));
    }
    return out;
}

/// Splits an even-dimensioned image into its four quadrants,
/// row-major order: TL, TR, BL, BR.
inline std::array<Image2D, 4> tile_quarters(const Image2D& img) {
    if (img.width % 2 != 0 || img.height % 2 != 0)
        throw std::invalid_argument("tile_quarters: image dimensions must be even");
    const int hw = img.width / 2;
    const int hh = img.height / 2;
    std::array<Image2D, 4> tiles = {
        Image2D(hw, hh, img.pixel_spacing), Image2D(hw, hh, img.pixel_spacing),
        Image2D(hw, hh, img.pixel_spacing), Image2D(hw, hh, img.pixel_spacing)};
    for (int q = 0; q < 4; ++q) {
        const int ox = (q % 2) * hw;
        const int oy = (q / 2) * hh;
        for (int y = 0; y < hh; ++y)
            for (int x = 0; x < hw; ++x)
                tiles[q].at(x, y) = img.at(ox + x, oy + y);
    }
    return tiles;
}

/// Inverse of tile_quarters; bit-exact round trip.
inline Image2D assemble_quarters(const std::array<Image2D, 4>& tiles) {
    const Image2D& tl = tiles[0];
    for (const Image2D& t : tiles)
        if (!t.same_shape(tl)) throw std::invalid_argument("assemble_quarters: tile shapes differ");
    Image2D out(tl.width * 2, tl.height * 2, tl.pixel_spacing);
    for (int q = 0; q < 4; ++q) {
        const int ox = (q % 2) * tl.width;
        const int oy = (q / 2) * tl.height;
        for (int y = 0; y < tl.height; ++y)
            for (int x = 0; x < tl.width; ++x)
                out.at(ox + x, oy + y) = tiles[q].at(x, y);
    }
    return out;
}

/// 2x2 block mean; requires even dimensions. Doubles the pixel spacing.
inline Image2D downsample2x(const Image2D& img) {
    if (img.width % 2 != 0 || img.height % 2 != 0)
        throw std::invalid_argument("downsample2x: image dimensions must be even");
    Image2D out(img.width / 2, img.height / 2, img.pixel_spacing * 2.0);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = 0.25f * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                                    img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1));
    return out;
}

} // namespace ldct
