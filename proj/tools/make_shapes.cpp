// Seeded generator of labelled binary test shapes (ellipses, rectangles,
// annuli) for exercising the pipeline without real scan data.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shapeclust/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a labelled synthetic shape dataset"};
    std::string out_dir = "shapes";
    std::size_t per_class = 20;
    std::uint64_t seed = 7;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--per-class", per_class, "images per shape class");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto shapes = shapeclust::make_shape_set(per_class, seed);
        shapeclust::write_shape_pngs(out_dir, shapes);
        std::cout << "wrote " << shapes.size() << " images to " << out_dir << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
