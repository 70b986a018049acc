#pragma once
// Rasterize a response map into a colormapped, nearest-neighbor upscaled
// image for the holistic assessor and for human inspection. PNG output is
// produced by a minimal encoder over zlib with fixed settings, so identical
// inputs yield identical bytes.

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <zlib.h>

#include "srq/error.hpp"
#include "srq/response_map.hpp"

namespace srq {

struct HeatmapImage {
    int pixel_width = 0;
    int pixel_height = 0;
    std::string colormap_name;
    double value_min = 0.0;
    double value_max = 0.0;
    bool degenerate = false;              // constant map: all pixels mapped to 0
    std::vector<std::uint8_t> rgb;        // row-major RGB8 raster
    std::vector<std::uint8_t> png;        // encoded bytes (lossless)
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

using ColormapTable = std::array<Rgb, 256>;

namespace detail {

inline ColormapTable make_gray_table() {
    ColormapTable t{};
    for (int i = 0; i < 256; ++i) {
        const auto v = static_cast<std::uint8_t>(i);
        t[static_cast<std::size_t>(i)] = {v, v, v};
    }
    return t;
}

// Blue-to-red heat ramp from fixed anchors, linearly interpolated to 256
// entries.
inline ColormapTable make_heat_table() {
    struct Anchor {
        double pos;
        Rgb color;
    };
    static constexpr Anchor anchors[] = {
        {0.000, {0, 0, 131}},   {0.125, {0, 0, 255}},   {0.375, {0, 255, 255}},
        {0.625, {255, 255, 0}}, {0.875, {255, 0, 0}},   {1.000, {128, 0, 0}},
    };
    ColormapTable t{};
    for (int i = 0; i < 256; ++i) {
        const double pos = static_cast<double>(i) / 255.0;
        std::size_t seg = 0;
        while (seg + 2 < std::size(anchors) && pos > anchors[seg + 1].pos) ++seg;
        const Anchor& a = anchors[seg];
        const Anchor& b = anchors[seg + 1];
        const double f = (pos - a.pos) / (b.pos - a.pos);
        auto lerp = [f](std::uint8_t x, std::uint8_t y) {
            return static_cast<std::uint8_t>(x + f * (static_cast<double>(y) - x) + 0.5);
        };
        t[static_cast<std::size_t>(i)] = {lerp(a.color.r, b.color.r), lerp(a.color.g, b.color.g),
                                          lerp(a.color.b, b.color.b)};
    }
    return t;
}

inline void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::vector<std::uint8_t>& data) {
    append_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = static_cast<std::uint32_t>(
        ::crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size())));
    append_be32(out, crc);
}

}  // namespace detail

inline std::vector<std::string> available_colormaps() { return {"gray", "heat"}; }

inline const ColormapTable& colormap_table(const std::string& name) {
    static const ColormapTable gray = detail::make_gray_table();
    static const ColormapTable heat = detail::make_heat_table();
    if (name == "gray") return gray;
    if (name == "heat") return heat;
    std::string available;
    for (const auto& n : available_colormaps()) {
        if (!available.empty()) available += ", ";
        available += n;
    }
    throw RenderError("unknown colormap '" + name + "' (available: " + available + ")");
}

// Truecolor 8-bit PNG, filter 0 on every scanline, fixed zlib level.
inline std::vector<std::uint8_t> encode_png_rgb8(const std::uint8_t* rgb, int width,
                                                 int height) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * static_cast<std::size_t>(width)));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);  // filter type: none
        const std::uint8_t* row = rgb + static_cast<std::size_t>(y) * 3 * width;
        raw.insert(raw.end(), row, row + 3 * static_cast<std::size_t>(width));
    }

    uLongf compressed_size = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (::compress2(compressed.data(), &compressed_size, raw.data(),
                    static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw RenderError("zlib compression failed while encoding PNG");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    detail::append_be32(ihdr, static_cast<std::uint32_t>(width));
    detail::append_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    detail::append_chunk(out, "IHDR", ihdr);
    detail::append_chunk(out, "IDAT", compressed);
    detail::append_chunk(out, "IEND", {});
    return out;
}

// Min-max normalize, colormap, nearest-neighbor upscale by `scale`, encode.
// A constant map normalizes to all zeros and sets the degenerate flag.
inline HeatmapImage render_heatmap(const ResponseMap& map, int scale = 16,
                                   const std::string& colormap = "heat") {
    validate(map);
    if (scale < 1) throw RenderError("scale must be >= 1");
    const ColormapTable& table = colormap_table(colormap);

    HeatmapImage image;
    image.colormap_name = colormap;
    image.pixel_width = map.width * scale;
    image.pixel_height = map.height * scale;

    double lo = map.values[0];
    double hi = map.values[0];
    for (double v : map.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    image.value_min = lo;
    image.value_max = hi;
    image.degenerate = !(lo < hi);
    const double inv_range = image.degenerate ? 0.0 : 1.0 / (hi - lo);

    image.rgb.resize(static_cast<std::size_t>(image.pixel_width) * image.pixel_height * 3);
    for (int py = 0; py < image.pixel_height; ++py) {
        const int i = py / scale;
        for (int px = 0; px < image.pixel_width; ++px) {
            const int j = px / scale;
            const double t = (map.at(i, j) - lo) * inv_range;
            const auto idx = static_cast<std::size_t>(std::min(255.0, t * 256.0));
            const Rgb& c = table[idx];
            std::uint8_t* p =
                image.rgb.data() + (static_cast<std::size_t>(py) * image.pixel_width + px) * 3;
            p[0] = c.r;
            p[1] = c.g;
            p[2] = c.b;
        }
    }
    image.png = encode_png_rgb8(image.rgb.data(), image.pixel_width, image.pixel_height);
    return image;
}

}  // namespace srq
