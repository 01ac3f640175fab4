#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "shapeclust/common.hpp"

namespace shapeclust {

enum class MetricId {
    Euclidean,
    SquaredEuclidean,
    SEuclidean,
    CityBlock,
    Minkowski,
    Chebychev,
    Cosine,
};

/// Distance between observed feature vectors; Minkowski carries its exponent.
struct Metric {
    MetricId id = MetricId::Euclidean;
    double minkowski_p = 2.0;

    Metric() = default;
    Metric(MetricId i) : id(i) {} // NOLINT(google-explicit-constructor)

    static Metric minkowski(double p) {
        if (!(p >= 1.0)) throw DomainError("minkowski exponent must be >= 1");
        Metric m;
        m.id = MetricId::Minkowski;
        m.minkowski_p = p;
        return m;
    }
};

inline const char* metric_name(MetricId id) {
    switch (id) {
    case MetricId::Euclidean: return "euclidean";
    case MetricId::SquaredEuclidean: return "squaredeuclidean";
    case MetricId::SEuclidean: return "seuclidean";
    case MetricId::CityBlock: return "cityblock";
    case MetricId::Minkowski: return "minkowski";
    case MetricId::Chebychev: return "chebychev";
    case MetricId::Cosine: return "cosine";
    }
    return "euclidean";
}

inline Metric metric_from_name(std::string_view name, double minkowski_p = 2.0) {
    if (name == "euclidean") return MetricId::Euclidean;
    if (name == "squaredeuclidean") return MetricId::SquaredEuclidean;
    if (name == "seuclidean") return MetricId::SEuclidean;
    if (name == "cityblock") return MetricId::CityBlock;
    if (name == "minkowski") return Metric::minkowski(minkowski_p);
    if (name == "chebychev") return MetricId::Chebychev;
    if (name == "cosine") return MetricId::Cosine;
    throw ConfigError("unknown metric: " + std::string(name));
}

inline bool euclidean_family(MetricId id) {
    return id == MetricId::Euclidean || id == MetricId::SquaredEuclidean;
}

/// Symmetric pairwise distances in condensed storage: the strict upper
/// triangle, row-major; d(i,i) is implicitly 0.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> condensed;

    static std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j) {
        // requires i < j < n
        return n * i - i * (i + 1) / 2 + (j - i - 1);
    }

    double at(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        if (i > j) std::swap(i, j);
        return condensed[condensed_index(n, i, j)];
    }

    double& ref(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return condensed[condensed_index(n, i, j)];
    }
};

inline DistanceMatrix pairwise_distance(const Matrix& features, const Metric& metric) {
    const std::size_t N = features.rows;
    const std::size_t k = features.cols;
    if (N < 2) throw DegenerateData("pairwise_distance: need at least 2 rows");
    if (metric.id == MetricId::Minkowski && !(metric.minkowski_p >= 1.0))
        throw DomainError("minkowski exponent must be >= 1");

    // per-coordinate scaling for the standardized metric (denominator N-1,
    // zero deviations replaced by 1)
    std::vector<double> inv_scale;
    if (metric.id == MetricId::SEuclidean) {
        inv_scale.assign(k, 1.0);
        for (std::size_t j = 0; j < k; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < N; ++i) mean += features.at(i, j);
            mean /= static_cast<double>(N);
            double var = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double d = features.at(i, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(N - 1);
            const double sd = std::sqrt(var);
            inv_scale[j] = sd > 0.0 ? 1.0 / sd : 1.0;
        }
    }

    std::vector<double> norms;
    if (metric.id == MetricId::Cosine) {
        norms.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += features.at(i, j) * features.at(i, j);
            norms[i] = std::sqrt(s);
            if (norms[i] == 0.0)
                throw ZeroVector("cosine distance undefined for zero-norm row " +
                                 std::to_string(i));
        }
    }

    const bool mink_is_euclidean =
        metric.id == MetricId::Minkowski && metric.minkowski_p == 2.0;

    DistanceMatrix dist;
    dist.n = N;
    dist.condensed.resize(N * (N - 1) / 2);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto x = features.row(i);
        for (std::size_t j = i + 1; j < N; ++j, ++idx) {
            const auto y = features.row(j);
            double d = 0.0;
            switch (metric.id) {
            case MetricId::Euclidean:
            case MetricId::SquaredEuclidean: {
                double s = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double t = x[c] - y[c];
                    s += t * t;
                }
                d = metric.id == MetricId::Euclidean ? std::sqrt(s) : s;
                break;
            }
            case MetricId::SEuclidean: {
                double s = 0.0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double t = (x[c] - y[c]) * inv_scale[c];
                    s += t * t;
                }
                d = std::sqrt(s);
                break;
            }
            case MetricId::CityBlock: {
                for (std::size_t c = 0; c < k; ++c) d += std::abs(x[c] - y[c]);
                break;
            }
            case MetricId::Minkowski: {
                double s = 0.0;
                if (mink_is_euclidean) {
                    for (std::size_t c = 0; c < k; ++c) {
                        const double t = x[c] - y[c];
                        s += t * t;
                    }
                    d = std::sqrt(s);
                } else {
                    for (std::size_t c = 0; c < k; ++c)
                        s += std::pow(std::abs(x[c] - y[c]), metric.minkowski_p);
                    d = std::pow(s, 1.0 / metric.minkowski_p);
                }
                break;
            }
            case MetricId::Chebychev: {
                for (std::size_t c = 0; c < k; ++c) d = std::max(d, std::abs(x[c] - y[c]));
                break;
            }
            case MetricId::Cosine: {
                double dotxy = 0.0;
                for (std::size_t c = 0; c < k; ++c) dotxy += x[c] * y[c];
                d = std::max(0.0, 1.0 - dotxy / (norms[i] * norms[j]));
                break;
            }
            }
            dist.condensed[idx] = d;
        }
    }
    return dist;
}

} // namespace shapeclust
