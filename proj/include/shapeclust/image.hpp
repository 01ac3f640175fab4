#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "shapeclust/common.hpp"

namespace shapeclust {

inline constexpr int kCanvas = 128;
inline constexpr std::size_t kPixelCount = static_cast<std::size_t>(kCanvas) * kCanvas;

/// Grayscale raster; intensities in [0,1], 0 = black.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels; // row-major

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 1.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Normalize an arbitrary raster to the 128x128 feature vector:
/// binarize (intensity < threshold is ink), crop to the tight ink bounding
/// box, area-average the crop so its longer side is 128, and center it on a
/// background canvas with the extra padding pixel going right/bottom.
/// Output is row-major ink coverage per canvas pixel, ink -> 1.0.
inline std::vector<double> normalize_image(const GrayImage& raw, double threshold,
                                           bool rebinarize = false) {
    if (raw.width < 1 || raw.height < 1) throw DomainError("normalize_image: empty raster");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("normalize_image: threshold must lie in (0,1)");

    int x0 = raw.width, y0 = raw.height, x1 = -1, y1 = -1;
    for (int y = 0; y < raw.height; ++y)
        for (int x = 0; x < raw.width; ++x)
            if (raw.at(x, y) < threshold) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) throw EmptyImage("no ink pixel below threshold");

    const int bw = x1 - x0 + 1;
    const int bh = y1 - y0 + 1;
    int tw = kCanvas, th = kCanvas;
    if (bw >= bh)
        th = std::clamp(static_cast<int>(std::lround(bh * static_cast<double>(kCanvas) / bw)), 1,
                        kCanvas);
    else
        tw = std::clamp(static_cast<int>(std::lround(bw * static_cast<double>(kCanvas) / bh)), 1,
                        kCanvas);

    // Box-filter resample of the binary ink mask; each output pixel holds the
    // ink fraction of its source footprint.
    const double sx = static_cast<double>(bw) / tw;
    const double sy = static_cast<double>(bh) / th;
    std::vector<double> scaled(static_cast<std::size_t>(tw) * th, 0.0);
    for (int oy = 0; oy < th; ++oy) {
        const double yb = oy * sy;
        const double ye = (oy + 1) * sy;
        const int iy0 = static_cast<int>(yb);
        const int iy1 = std::min(bh - 1, static_cast<int>(std::ceil(ye)) - 1);
        for (int ox = 0; ox < tw; ++ox) {
            const double xb = ox * sx;
            const double xe = (ox + 1) * sx;
            const int ix0 = static_cast<int>(xb);
            const int ix1 = std::min(bw - 1, static_cast<int>(std::ceil(xe)) - 1);
            double acc = 0.0;
            for (int iy = iy0; iy <= iy1; ++iy) {
                const double wy = std::min(ye, static_cast<double>(iy + 1)) -
                                  std::max(yb, static_cast<double>(iy));
                if (wy <= 0.0) continue;
                for (int ix = ix0; ix <= ix1; ++ix) {
                    const double wx = std::min(xe, static_cast<double>(ix + 1)) -
                                      std::max(xb, static_cast<double>(ix));
                    if (wx <= 0.0) continue;
                    if (raw.at(x0 + ix, y0 + iy) < threshold) acc += wx * wy;
                }
            }
            scaled[static_cast<std::size_t>(oy) * tw + ox] =
                std::clamp(acc / (sx * sy), 0.0, 1.0);
        }
    }

    const int px = (kCanvas - tw) / 2;
    const int py = (kCanvas - th) / 2;
    std::vector<double> out(kPixelCount, 0.0);
    for (int oy = 0; oy < th; ++oy)
        for (int ox = 0; ox < tw; ++ox) {
            double v = scaled[static_cast<std::size_t>(oy) * tw + ox];
            if (rebinarize) v = v >= 0.5 ? 1.0 : 0.0;
            out[static_cast<std::size_t>(py + oy) * kCanvas + (px + ox)] = v;
        }
    return out;
}

} // namespace shapeclust
