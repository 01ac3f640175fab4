#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/cophenet.hpp"
#include "shapeclust/distance.hpp"
#include "shapeclust/linkage.hpp"

namespace shapeclust {

/// Internal node whose two children are both leaves: a proposed most-similar
/// pair of profiles.
struct Seed {
    std::size_t left = 0;  // leaf id, left < right
    std::size_t right = 0;
    double height = 0.0;
};

/// All seed pairs ordered by merge height ascending (ties keep merge order).
inline std::vector<Seed> extract_seeds(const LinkageTree& tree) {
    std::vector<Seed> seeds;
    for (const auto& m : tree.merges)
        if (m.left < tree.n_leaves && m.right < tree.n_leaves)
            seeds.push_back({m.left, m.right, m.height});
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const Seed& a, const Seed& b) { return a.height < b.height; });
    return seeds;
}

/// Left-to-right dendrogram traversal; at each internal node the child with
/// the smaller minimum descendant leaf id is visited first. Applying the
/// permutation to the distance matrix gives the block-diagonal rendering.
inline std::vector<std::size_t> leaf_order(const LinkageTree& tree) {
    const std::size_t n = tree.n_leaves;
    if (n == 0) return {};
    if (tree.merges.empty()) return {0};

    std::vector<std::size_t> min_desc(tree.node_count());
    for (std::size_t i = 0; i < n; ++i) min_desc[i] = i;
    for (std::size_t k = 0; k < tree.merges.size(); ++k)
        min_desc[n + k] = std::min(min_desc[tree.merges[k].left], min_desc[tree.merges[k].right]);

    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::size_t> stack{tree.root_id()};
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        if (id < n) {
            order.push_back(id);
            continue;
        }
        const auto& m = tree.merges[id - n];
        std::size_t first = m.left, second = m.right;
        if (min_desc[second] < min_desc[first]) std::swap(first, second);
        stack.push_back(second); // LIFO: pushed last is visited first
        stack.push_back(first);
    }
    return order;
}

enum class CellStatus { Ok, GeometryWarning, Skipped, Degenerate };

inline const char* cell_status_name(CellStatus s) {
    switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::GeometryWarning: return "geometry_warning";
    case CellStatus::Skipped: return "skipped";
    case CellStatus::Degenerate: return "degenerate";
    }
    return "skipped";
}

struct GridCell {
    Method method = Method::Single;
    Metric metric;
    double cophenet = 0.0;
    CellStatus status = CellStatus::Skipped;
};

struct SelectOptions {
    std::string dataset_name;
    bool strict_geometry = false; // skip geometry-dependent methods on non-euclidean metrics
};

/// One experiment outcome: the method-major score grid, the winning pair and
/// its tree, seeds and leaf ordering.
struct ClusterRun {
    std::string dataset_name;
    std::size_t n_methods = 0;
    std::size_t n_metrics = 0;
    std::vector<GridCell> grid; // n_methods * n_metrics, metric index fastest
    Method chosen_method = Method::Single;
    Metric chosen_metric;
    double chosen_cophenet = 0.0;
    LinkageTree tree;
    std::vector<Seed> seeds;
    std::vector<std::size_t> leaf_order;

    const GridCell& cell(std::size_t method_idx, std::size_t metric_idx) const {
        return grid[method_idx * n_metrics + metric_idx];
    }
};

/// Score every admissible (method, metric) pair by cophenetic correlation and
/// keep the argmax; ties break in row-major grid order (method, then metric).
/// Skipped cells score as -inf; degenerate cells score 0.
inline ClusterRun select_best(const Matrix& features, std::span<const Method> methods,
                              std::span<const Metric> metrics, const SelectOptions& opt = {}) {
    if (features.rows < 3) throw DegenerateData("select_best: need at least 3 observations");
    if (methods.empty() || metrics.empty())
        throw ConfigError("select_best: empty method or metric list");

    ClusterRun run;
    run.dataset_name = opt.dataset_name;
    run.n_methods = methods.size();
    run.n_metrics = metrics.size();
    run.grid.resize(methods.size() * metrics.size());

    for (std::size_t mj = 0; mj < metrics.size(); ++mj) {
        const Metric& metric = metrics[mj];
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            auto& c = run.grid[mi * metrics.size() + mj];
            c.method = methods[mi];
            c.metric = metric;
        }
        DistanceMatrix dist;
        try {
            dist = pairwise_distance(features, metric);
        } catch (const Error&) {
            continue; // whole metric column stays skipped
        }
        const InputGeometry geom = geometry_of(metric);
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            auto& c = run.grid[mi * metrics.size() + mj];
            const bool formal = geometry_dependent(methods[mi]) &&
                                geom == InputGeometry::NonEuclidean;
            if (formal && opt.strict_geometry) continue;
            const LinkageTree tree = linkage(dist, methods[mi], geom, true);
            const CophenetResult r = cophenetic_correlation(tree, dist);
            c.cophenet = r.value;
            c.status = r.degenerate ? CellStatus::Degenerate
                                    : (formal ? CellStatus::GeometryWarning : CellStatus::Ok);
        }
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_mi = 0, best_mj = 0;
    bool any = false;
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (std::size_t mj = 0; mj < metrics.size(); ++mj) {
            const auto& c = run.grid[mi * metrics.size() + mj];
            if (c.status == CellStatus::Skipped) continue;
            if (!any || c.cophenet > best) {
                best = c.cophenet;
                best_mi = mi;
                best_mj = mj;
                any = true;
            }
        }
    if (!any) throw AllPairsSkipped("select_best: no admissible (method, metric) pair");

    run.chosen_method = methods[best_mi];
    run.chosen_metric = metrics[best_mj];
    run.chosen_cophenet = best;
    const DistanceMatrix dist = pairwise_distance(features, run.chosen_metric);
    run.tree = linkage(dist, run.chosen_method, geometry_of(run.chosen_metric), true);
    run.seeds = extract_seeds(run.tree);
    run.leaf_order = leaf_order(run.tree);
    return run;
}

inline void write_grid_csv(const std::filesystem::path& path, const ClusterRun& run) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "method,metric,cophenet,status\n";
    for (const auto& c : run.grid) {
        os << method_name(c.method) << ',' << metric_name(c.metric.id) << ',';
        if (c.status != CellStatus::Skipped) os << format_double("%.6f", c.cophenet);
        os << ',' << cell_status_name(c.status) << '\n';
    }
}

inline void write_seeds_csv(const std::filesystem::path& path, std::span<const Seed> seeds,
                            std::span<const std::string> labels) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "rank,height,left_file,right_file\n";
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        const auto& s = seeds[r];
        if (s.left >= labels.size() || s.right >= labels.size())
            throw LabelMismatch("seed leaf id outside label list");
        os << (r + 1) << ',' << format_double("%.6f", s.height) << ','
           << csv_field(labels[s.left]) << ',' << csv_field(labels[s.right]) << '\n';
    }
}

} // namespace shapeclust
