#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/distance.hpp"

namespace shapeclust {

struct GrayBitmap {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> pixels;

    GrayBitmap() = default;
    GrayBitmap(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}
    unsigned char& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    unsigned char at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Reordered distance matrix as an n x n grayscale image: the clip_lo
/// percentile of condensed distances maps to black and clip_hi to white, so
/// similar pairs render dark and the leaf ordering shows the diagonal blocks.
/// The diagonal is black; a degenerate clip range (lo == hi) maps everything
/// off-diagonal to mid-gray.
inline GrayBitmap render_distance_matrix(const DistanceMatrix& dist,
                                         std::span<const std::size_t> order, double clip_lo = 3.0,
                                         double clip_hi = 97.0) {
    const std::size_t n = dist.n;
    if (order.size() != n) throw SizeMismatch("render: permutation size != matrix size");
    std::vector<char> seen(n, 0);
    for (std::size_t v : order) {
        if (v >= n || seen[v]) throw DomainError("render: order is not a permutation");
        seen[v] = 1;
    }
    if (!(clip_lo >= 0.0 && clip_lo <= clip_hi && clip_hi <= 100.0))
        throw DomainError("render: bad clip percentiles");

    GrayBitmap img(static_cast<int>(n), static_cast<int>(n));
    if (n < 2) return img;

    const double lo = percentile(dist.condensed, clip_lo);
    const double hi = percentile(dist.condensed, clip_hi);
    const double span = hi - lo;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            if (r == c) continue;
            const double d = dist.at(order[r], order[c]);
            const double t = span > 0.0 ? std::clamp((d - lo) / span, 0.0, 1.0) : 0.5;
            img.at(static_cast<int>(c), static_cast<int>(r)) =
                static_cast<unsigned char>(std::lround(255.0 * t));
        }
    return img;
}

inline void write_pgm(const std::filesystem::path& path, const GrayBitmap& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw IoError("short write to " + path.string());
}

inline GrayBitmap read_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    is >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255)
        throw DecodeError("unsupported pgm header in " + path.string());
    is.get(); // single whitespace after maxval
    GrayBitmap img(w, h);
    is.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(is.gcount()) != img.pixels.size())
        throw DecodeError("truncated pgm raster in " + path.string());
    return img;
}

} // namespace shapeclust
