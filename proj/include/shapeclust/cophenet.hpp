#pragma once

#include <cmath>
#include <vector>

#include "shapeclust/common.hpp"
#include "shapeclust/distance.hpp"
#include "shapeclust/linkage.hpp"

namespace shapeclust {

/// Entry (i,j): height of the lowest merge under which leaves i and j first
/// share a cluster.
inline DistanceMatrix cophenetic_distances(const LinkageTree& tree) {
    const std::size_t n = tree.n_leaves;
    DistanceMatrix coph;
    coph.n = n;
    coph.condensed.assign(n * (n - 1) / 2, 0.0);

    std::vector<std::vector<std::size_t>> members(tree.node_count());
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
    for (std::size_t k = 0; k < tree.merges.size(); ++k) {
        const auto& m = tree.merges[k];
        auto& left = members[m.left];
        auto& right = members[m.right];
        for (std::size_t a : left)
            for (std::size_t b : right) coph.ref(a, b) = m.height;
        const std::size_t id = n + k;
        if (left.size() >= right.size()) {
            members[id] = std::move(left);
            members[id].insert(members[id].end(), right.begin(), right.end());
        } else {
            members[id] = std::move(right);
            members[id].insert(members[id].end(), left.begin(), left.end());
        }
        left.clear();
        right.clear();
    }
    return coph;
}

struct CophenetResult {
    double value = 0.0;
    bool degenerate = false; // zero variance in either vector
};

/// Pearson correlation between the condensed original and cophenetic
/// distances. Zero variance on either side yields 0 with the degenerate flag;
/// a bitwise-perfect ultrametric fit yields exactly 1.0.
inline CophenetResult cophenetic_correlation(const LinkageTree& tree,
                                             const DistanceMatrix& dist) {
    if (tree.n_leaves != dist.n)
        throw SizeMismatch("cophenetic_correlation: tree and matrix sizes differ");
    const DistanceMatrix coph = cophenetic_distances(tree);
    const auto& x = dist.condensed;
    const auto& y = coph.condensed;
    const std::size_t m = x.size();

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return {0.0, true};
    if (x == y) return {1.0, false};
    return {sxy / std::sqrt(sxx * syy), false};
}

} // namespace shapeclust
