#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/image.hpp"
#include "shapeclust/meta.hpp"
#include "shapeclust/png.hpp"

namespace shapeclust {

struct ProfileRecord {
    ProfileMeta meta;
    std::vector<double> pixels; // 128*128 ink coverage, row-major
};

/// Ordered collection of normalized profiles; record order is lexicographic
/// by source filename.
struct Dataset {
    std::string name;
    std::vector<ProfileRecord> records;

    Matrix pixel_matrix() const {
        Matrix m(records.size(), kPixelCount);
        for (std::size_t i = 0; i < records.size(); ++i)
            std::copy(records[i].pixels.begin(), records[i].pixels.end(), m.row(i).begin());
        return m;
    }

    std::vector<std::string> filenames() const {
        std::vector<std::string> names;
        names.reserve(records.size());
        for (const auto& r : records) names.push_back(r.meta.source_path);
        return names;
    }
};

struct ManifestRow {
    std::string path;
    std::string catalogue_id;
    std::string page;
    std::string figure_id;
    std::string status; // ok | malformed_name | empty_image | decode_error
};

inline void write_manifest_csv(const std::filesystem::path& path,
                               const std::vector<ManifestRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "path,catalogue_id,page,figure_id,status\n";
    for (const auto& r : rows)
        os << csv_field(r.path) << ',' << csv_field(r.catalogue_id) << ',' << csv_field(r.page)
           << ',' << csv_field(r.figure_id) << ',' << r.status << '\n';
}

inline std::vector<ManifestRow> read_manifest_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty manifest " + path.string());
    std::vector<ManifestRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 5) throw IoError("bad manifest row: " + line);
        rows.push_back({f[0], f[1], f[2], f[3], f[4]});
    }
    return rows;
}

/// Load every .png under root_dir (non-recursive), normalized and sorted by
/// filename. Per-file failures are recorded in the manifest and skipped.
inline Dataset load_dataset(const std::filesystem::path& root_dir, const std::string& name,
                            double threshold, std::vector<ManifestRow>* manifest_out = nullptr,
                            bool rebinarize = false) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root_dir))
        throw EmptyDirectory("not a directory: " + root_dir.string());

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(root_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string base = entry.path().filename().string();
        if (has_png_extension(base)) files.push_back(base);
    }
    if (files.empty()) throw EmptyDirectory("no .png files in " + root_dir.string());
    std::sort(files.begin(), files.end());

    Dataset ds;
    ds.name = name;
    std::vector<ManifestRow> manifest;
    manifest.reserve(files.size());
    for (const auto& base : files) {
        ManifestRow row;
        row.path = base;
        row.status = "ok";
        ProfileMeta meta;
        try {
            meta = parse_profile_id(base);
            row.catalogue_id = meta.catalogue_id;
            row.page = meta.page;
            row.figure_id = meta.figure_id;
        } catch (const MalformedFilename&) {
            row.status = "malformed_name";
            manifest.push_back(row);
            continue;
        }
        GrayImage img;
        try {
            img = read_png_gray(root_dir / base);
        } catch (const Error&) {
            row.status = "decode_error";
            manifest.push_back(row);
            continue;
        }
        try {
            auto pixels = normalize_image(img, threshold, rebinarize);
            ds.records.push_back({std::move(meta), std::move(pixels)});
        } catch (const EmptyImage&) {
            row.status = "empty_image";
        }
        manifest.push_back(row);
    }
    if (manifest_out) *manifest_out = std::move(manifest);
    return ds;
}

// Matrix container used for both the normalized-pixel cache and the latent
// features file: a "features-v1 N k" text header line followed by N*k
// float64 little-endian values, row-major.

inline void write_matrix_file(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "features-v1 " << m.rows << ' ' << m.cols << '\n';
    detail::write_f64le(os, m.values);
    if (!os) throw IoError("short write to " + path.string());
}

inline Matrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(is, header)) throw IoError("missing header in " + path.string());
    std::istringstream hs(header);
    std::string magic;
    std::size_t rows = 0, cols = 0;
    hs >> magic >> rows >> cols;
    if (magic != "features-v1" || hs.fail())
        throw DecodeError("bad matrix header in " + path.string());
    Matrix m(rows, cols);
    detail::read_f64le(is, m.values);
    return m;
}

} // namespace shapeclust
