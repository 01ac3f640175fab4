#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/distance.hpp"

namespace shapeclust {

enum class Method { Single, Complete, Average, Weighted, Centroid, Median, Ward };

inline const char* method_name(Method m) {
    switch (m) {
    case Method::Single: return "single";
    case Method::Complete: return "complete";
    case Method::Average: return "average";
    case Method::Weighted: return "weighted";
    case Method::Centroid: return "centroid";
    case Method::Median: return "median";
    case Method::Ward: return "ward";
    }
    return "single";
}

inline Method method_from_name(std::string_view name) {
    if (name == "single") return Method::Single;
    if (name == "complete") return Method::Complete;
    if (name == "average") return Method::Average;
    if (name == "weighted") return Method::Weighted;
    if (name == "centroid") return Method::Centroid;
    if (name == "median") return Method::Median;
    if (name == "ward") return Method::Ward;
    throw ConfigError("unknown method: " + std::string(name));
}

/// Centroid, median and ward recurrences are exact only on squared Euclidean
/// distances; the input geometry tells linkage how to square/unsquare.
enum class InputGeometry { Euclidean, SquaredEuclidean, NonEuclidean };

inline InputGeometry geometry_of(const Metric& metric) {
    if (metric.id == MetricId::Euclidean) return InputGeometry::Euclidean;
    if (metric.id == MetricId::SquaredEuclidean) return InputGeometry::SquaredEuclidean;
    return InputGeometry::NonEuclidean;
}

inline bool geometry_dependent(Method m) {
    return m == Method::Centroid || m == Method::Median || m == Method::Ward;
}

/// One agglomeration step. Node ids 0..n-1 are leaves; merge k creates node
/// n+k. left < right always.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct LinkageTree {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;

    std::size_t node_count() const { return n_leaves + merges.size(); }
    std::size_t root_id() const { return n_leaves + merges.size() - 1; }
};

/// Agglomerative clustering via the Lance-Williams recurrence. The pair with
/// minimal inter-cluster distance merges at each step; ties break on the
/// smaller (left,right) node-id pair. Heights are not necessarily monotone
/// for centroid/median (inversions render as-is).
inline LinkageTree linkage(const DistanceMatrix& dist, Method method,
                           InputGeometry geometry = InputGeometry::Euclidean,
                           bool allow_formal_geometry = false) {
    const std::size_t n = dist.n;
    if (n < 2) throw DegenerateData("linkage: need at least 2 observations");
    const bool squared_space = geometry_dependent(method);
    if (squared_space && geometry == InputGeometry::NonEuclidean && !allow_formal_geometry)
        throw IncompatibleMetric(std::string(method_name(method)) +
                                 " linkage requires a euclidean-family metric");
    const bool square_input = squared_space && geometry != InputGeometry::SquaredEuclidean;

    std::vector<double> work(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = dist.condensed[DistanceMatrix::condensed_index(n, i, j)];
            if (square_input) d *= d;
            work[i * n + j] = work[j * n + i] = d;
        }

    std::vector<char> active(n, 1);
    std::vector<std::size_t> node(n), csize(n, 1);
    std::iota(node.begin(), node.end(), 0);

    struct Candidate {
        double value = std::numeric_limits<double>::infinity();
        std::size_t id_a = 0, id_b = 0; // node ids, id_a < id_b
        std::size_t slot = 0;           // partner slot
        bool valid = false;
    };
    auto make_candidate = [&](std::size_t si, std::size_t sj) {
        Candidate c;
        c.value = work[si * n + sj];
        c.id_a = node[si];
        c.id_b = node[sj];
        if (c.id_a > c.id_b) std::swap(c.id_a, c.id_b);
        c.slot = sj;
        c.valid = true;
        return c;
    };
    auto better = [](const Candidate& a, const Candidate& b) {
        if (!b.valid) return true;
        if (a.value != b.value) return a.value < b.value;
        if (a.id_a != b.id_a) return a.id_a < b.id_a;
        return a.id_b < b.id_b;
    };

    std::vector<Candidate> row_best(n);
    auto recompute_row = [&](std::size_t si) {
        Candidate best;
        for (std::size_t sj = 0; sj < n; ++sj) {
            if (sj == si || !active[sj]) continue;
            Candidate c = make_candidate(si, sj);
            if (better(c, best)) best = c;
        }
        row_best[si] = best;
    };
    for (std::size_t si = 0; si < n; ++si) recompute_row(si);

    LinkageTree tree;
    tree.n_leaves = n;
    tree.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        Candidate best;
        std::size_t best_si = 0;
        for (std::size_t si = 0; si < n; ++si) {
            if (!active[si] || !row_best[si].valid) continue;
            if (better(row_best[si], best)) {
                best = row_best[si];
                best_si = si;
            }
        }
        const std::size_t si = std::min(best_si, best.slot);
        const std::size_t sj = std::max(best_si, best.slot);
        const double raw_h = work[si * n + sj];

        Merge m;
        m.left = std::min(node[si], node[sj]);
        m.right = std::max(node[si], node[sj]);
        m.height = square_input ? std::sqrt(std::max(0.0, raw_h)) : raw_h;
        m.size = csize[si] + csize[sj];
        tree.merges.push_back(m);

        const double ni = static_cast<double>(csize[si]);
        const double nj = static_cast<double>(csize[sj]);
        for (std::size_t sk = 0; sk < n; ++sk) {
            if (!active[sk] || sk == si || sk == sj) continue;
            const double dki = work[sk * n + si];
            const double dkj = work[sk * n + sj];
            const double nk = static_cast<double>(csize[sk]);
            double d = 0.0;
            switch (method) {
            case Method::Single:
                d = std::min(dki, dkj);
                break;
            case Method::Complete:
                d = std::max(dki, dkj);
                break;
            case Method::Average:
                d = (ni * dki + nj * dkj) / (ni + nj);
                break;
            case Method::Weighted:
                d = 0.5 * (dki + dkj);
                break;
            case Method::Centroid: {
                const double s = ni + nj;
                d = (ni * dki + nj * dkj) / s - (ni * nj * raw_h) / (s * s);
                break;
            }
            case Method::Median:
                d = 0.5 * dki + 0.5 * dkj - 0.25 * raw_h;
                break;
            case Method::Ward: {
                const double t = ni + nj + nk;
                d = ((ni + nk) * dki + (nj + nk) * dkj - nk * raw_h) / t;
                break;
            }
            }
            if (squared_space && d < 0.0) d = 0.0;
            work[sk * n + si] = work[si * n + sk] = d;
        }

        active[sj] = 0;
        node[si] = n + step;
        csize[si] = csize[si] + csize[sj];

        // refresh candidate rows touched by the merge
        recompute_row(si);
        for (std::size_t sk = 0; sk < n; ++sk) {
            if (!active[sk] || sk == si) continue;
            if (row_best[sk].valid && (row_best[sk].slot == si || row_best[sk].slot == sj)) {
                recompute_row(sk);
            } else {
                Candidate c = make_candidate(sk, si);
                if (better(c, row_best[sk])) row_best[sk] = c;
            }
        }
    }
    return tree;
}

} // namespace shapeclust
