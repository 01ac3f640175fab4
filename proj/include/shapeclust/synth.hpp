#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/image.hpp"
#include "shapeclust/png.hpp"

namespace shapeclust {

// Seeded generator of labelled binary test shapes, used by the end-to-end
// checks and exposed through the make_shapes tool so the pipeline can be
// exercised without real scan data.

enum class ShapeClass { Ellipse, Rectangle, Annulus };

inline const char* shape_class_catalogue(ShapeClass c) {
    switch (c) {
    case ShapeClass::Ellipse: return "ELL";
    case ShapeClass::Rectangle: return "RECT";
    case ShapeClass::Annulus: return "ANN";
    }
    return "ELL";
}

inline ShapeClass shape_class_from_catalogue(std::string_view id) {
    if (id == "ELL") return ShapeClass::Ellipse;
    if (id == "RECT") return ShapeClass::Rectangle;
    if (id == "ANN") return ShapeClass::Annulus;
    throw DomainError("unknown shape catalogue: " + std::string(id));
}

struct SynthShape {
    ShapeClass label = ShapeClass::Ellipse;
    std::string filename;
    GrayImage image; // 128x128, ink = 0.0, background = 1.0
};

inline std::vector<SynthShape> make_shape_set(std::size_t per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<SynthShape> shapes;
    shapes.reserve(3 * per_class);
    const ShapeClass classes[] = {ShapeClass::Ellipse, ShapeClass::Rectangle,
                                  ShapeClass::Annulus};
    for (ShapeClass cls : classes) {
        for (std::size_t k = 0; k < per_class; ++k) {
            // each class lives in its own aspect band so the three classes
            // stay separable after aspect-preserving normalization
            double aspect_lo = 0.88, aspect_hi = 0.96; // ellipses: nearly round
            if (cls == ShapeClass::Rectangle) {
                aspect_lo = 0.55;
                aspect_hi = 0.65; // clearly oblong
            } else if (cls == ShapeClass::Annulus) {
                aspect_lo = 0.75;
                aspect_hi = 0.85;
            }
            const double a = uniform_range(rng, 46.0, 56.0);              // x half-extent
            const double b = a * uniform_range(rng, aspect_lo, aspect_hi); // y half-extent
            const double hole = uniform_range(rng, 0.50, 0.60);           // annulus inner ratio
            const double cx = 64.0 + uniform_range(rng, -4.0, 4.0);
            const double cy = 64.0 + uniform_range(rng, -4.0, 4.0);

            SynthShape shape;
            shape.label = cls;
            char name[64];
            std::snprintf(name, sizeof(name), "%s-1.%02zu.png", shape_class_catalogue(cls), k);
            shape.filename = name;
            shape.image = GrayImage(kCanvas, kCanvas, 1.0);
            for (int y = 0; y < kCanvas; ++y)
                for (int x = 0; x < kCanvas; ++x) {
                    const double dx = (x + 0.5 - cx) / a;
                    const double dy = (y + 0.5 - cy) / b;
                    bool ink = false;
                    switch (cls) {
                    case ShapeClass::Ellipse:
                        ink = dx * dx + dy * dy <= 1.0;
                        break;
                    case ShapeClass::Rectangle:
                        ink = std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
                        break;
                    case ShapeClass::Annulus: {
                        const double e = dx * dx + dy * dy;
                        ink = e <= 1.0 && e >= hole * hole;
                        break;
                    }
                    }
                    if (ink) shape.image.at(x, y) = 0.0;
                }
            shapes.push_back(std::move(shape));
        }
    }
    return shapes;
}

inline void write_shape_pngs(const std::filesystem::path& dir,
                             std::span<const SynthShape> shapes) {
    std::filesystem::create_directories(dir);
    std::vector<unsigned char> raster(kPixelCount);
    for (const auto& shape : shapes) {
        for (std::size_t i = 0; i < kPixelCount; ++i)
            raster[i] = shape.image.pixels[i] < 0.5 ? 0 : 255;
        write_png_gray8(dir / shape.filename, raster.data(), kCanvas, kCanvas);
    }
}

} // namespace shapeclust
