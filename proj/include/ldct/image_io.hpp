#pragma once

#include "ldct/image.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace ldct {

// "LDCT" container, version 1, little-endian throughout:
//   bytes 0..3   magic "LDCT"
//   byte  4      version (1)
//   bytes 5..8   u32 width
//   bytes 9..12  u32 height
//   bytes 13..16 f32 pixel spacing [mm]
//   bytes 17..   f32 pixels, row-major
namespace detail {

static_assert(std::endian::native == std::endian::little,
              "ldct file I/O assumes a little-endian host");

inline void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}
inline void put_f32(std::ostream& os, float v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}
inline void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), 8);
}
inline std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
inline float get_f32(std::istream& is) {
    float v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
inline double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

} // namespace detail

inline void write_image(const std::string& path, const Image2D& img) {
    img.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_image: cannot open '" + path + "' for writing");
    os.write("LDCT", 4);
    os.put(static_cast<char>(1));
    detail::put_u32(os, static_cast<std::uint32_t>(img.width));
    detail::put_u32(os, static_cast<std::uint32_t>(img.height));
    detail::put_f32(os, static_cast<float>(img.pixel_spacing));
    os.write(reinterpret_cast<const char*>(img.data.data()),
             static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    if (!os) throw std::runtime_error("write_image: write failed for '" + path + "'");
}

inline Image2D read_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_image: cannot open '" + path + "'");
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LDCT", 4) != 0)
        throw std::runtime_error("read_image: '" + path + "' is not an LDCT file (bad magic)");
    const int version = is.get();
    if (version != 1)
        throw std::runtime_error("read_image: unsupported LDCT version " + std::to_string(version));
    const std::uint32_t w = detail::get_u32(is);
    const std::uint32_t h = detail::get_u32(is);
    const float spacing = detail::get_f32(is);
    if (!is) throw std::runtime_error("read_image: truncated header in '" + path + "'");
    if (w == 0 || h == 0 || !(spacing > 0.0f))
        throw std::runtime_error("read_image: invalid header in '" + path + "'");
    Image2D img(static_cast<int>(w), static_cast<int>(h), spacing);
    is.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    if (static_cast<std::size_t>(is.gcount()) != img.data.size() * sizeof(float))
        throw std::runtime_error("read_image: '" + path + "' payload shorter than " +
                                 std::to_string(w) + "x" + std::to_string(h) +
                                 " declared in header");
    if (is.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("read_image: '" + path + "' has trailing bytes beyond " +
                                 std::to_string(w) + "x" + std::to_string(h) + " payload");
    for (float v : img.data)
        if (!std::isfinite(v))
            throw std::runtime_error("read_image: non-finite pixel value in '" + path + "'");
    return img;
}

/// Binary PGM (P5), maxval 255.
inline void write_pgm(const std::string& path, const Image8& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm: cannot open '" + path + "' for writing");
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data.data()),
             static_cast<std::streamsize>(img.data.size()));
    if (!os) throw std::runtime_error("write_pgm: write failed for '" + path + "'");
}

} // namespace ldct
