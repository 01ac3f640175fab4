#pragma once

#include <string>
#include <string_view>

#include "shapeclust/common.hpp"

namespace shapeclust {

/// Catalogue metadata parsed from a "IDCAT-PAGE.FIGURE.png" filename.
struct ProfileMeta {
    std::string catalogue_id;
    std::string page;
    std::string figure_id;
    std::string source_path;
};

inline std::string_view basename_of(std::string_view path) {
    const auto slash = path.find_last_of("/\\");
    return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

inline bool has_png_extension(std::string_view name) {
    if (name.size() < 4) return false;
    const auto ext = name.substr(name.size() - 4);
    return ext[0] == '.' && (ext[1] == 'p' || ext[1] == 'P') &&
           (ext[2] == 'n' || ext[2] == 'N') && (ext[3] == 'g' || ext[3] == 'G');
}

/// Parse "IDCAT-PAGE.FIGURE.png". The figure id is everything after the first
/// '.' of the remainder and may itself contain dots or spaces.
inline ProfileMeta parse_profile_id(const std::string& filename) {
    const std::string_view base = basename_of(filename);
    if (!has_png_extension(base))
        throw MalformedFilename("missing .png extension: " + std::string(base));
    const std::string_view stem = base.substr(0, base.size() - 4);

    const auto dash = stem.find('-');
    if (dash == std::string_view::npos)
        throw MalformedFilename("missing '-' separator: " + std::string(base));
    if (stem.find('-', dash + 1) != std::string_view::npos)
        throw MalformedFilename("more than one '-' separator: " + std::string(base));

    const std::string_view catalogue = stem.substr(0, dash);
    const std::string_view rest = stem.substr(dash + 1);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos)
        throw MalformedFilename("missing '.' separator: " + std::string(base));

    const std::string_view page = rest.substr(0, dot);
    const std::string_view figure = rest.substr(dot + 1);
    if (catalogue.empty() || page.empty() || figure.empty())
        throw MalformedFilename("empty name component: " + std::string(base));

    ProfileMeta meta;
    meta.catalogue_id = std::string(catalogue);
    meta.page = std::string(page);
    meta.figure_id = std::string(figure);
    meta.source_path = filename;
    return meta;
}

/// Inverse of parse_profile_id, reproducing the original basename.
inline std::string format_profile_filename(const ProfileMeta& meta) {
    return meta.catalogue_id + "-" + meta.page + "." + meta.figure_id + ".png";
}

} // namespace shapeclust
