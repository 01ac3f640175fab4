#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "shapeclust/cluster.hpp"
#include "shapeclust/linkage.hpp"
#include "support/oracles.hpp"

using namespace shapeclust;

namespace {

Matrix line_points() {
    Matrix m(3, 1);
    m.values = {0.0, 1.0, 10.0};
    return m;
}

void check_tree_equal(const LinkageTree& got, const LinkageTree& want, double tol = 1e-9) {
    REQUIRE(got.n_leaves == want.n_leaves);
    REQUIRE(got.merges.size() == want.merges.size());
    for (std::size_t k = 0; k < got.merges.size(); ++k) {
        CHECK(got.merges[k].left == want.merges[k].left);
        CHECK(got.merges[k].right == want.merges[k].right);
        CHECK(got.merges[k].size == want.merges[k].size);
        CHECK(std::fabs(got.merges[k].height - want.merges[k].height) <= tol);
    }
}

} // namespace

TEST_CASE("single linkage on a line merges nearest pair first") {
    const auto d = pairwise_distance(line_points(), MetricId::Euclidean);
    const auto tree = linkage(d, Method::Single);
    REQUIRE(tree.merges.size() == 2);
    CHECK(tree.merges[0].left == 0);
    CHECK(tree.merges[0].right == 1);
    CHECK(tree.merges[0].height == doctest::Approx(1.0));
    CHECK(tree.merges[0].size == 2);
    CHECK(tree.merges[1].left == 2);
    CHECK(tree.merges[1].right == 3);
    CHECK(tree.merges[1].height == doctest::Approx(9.0));
    CHECK(tree.merges[1].size == 3);
}

TEST_CASE("complete linkage uses the farthest distance") {
    const auto d = pairwise_distance(line_points(), MetricId::Euclidean);
    const auto tree = linkage(d, Method::Complete);
    CHECK(tree.merges[1].height == doctest::Approx(10.0));
}

TEST_CASE("ties break on the smaller node-id pair") {
    DistanceMatrix d;
    d.n = 4;
    d.condensed.assign(6, 1.0); // all pairs equidistant
    const auto tree = linkage(d, Method::Single);
    REQUIRE(tree.merges.size() == 3);
    CHECK(tree.merges[0].left == 0);
    CHECK(tree.merges[0].right == 1);
    CHECK(tree.merges[1].left == 2);
    CHECK(tree.merges[1].right == 3);
    CHECK(tree.merges[2].left == 4);
    CHECK(tree.merges[2].right == 5);
}

TEST_CASE("geometry-dependent methods reject non-euclidean input unless overridden") {
    std::mt19937_64 rng(3);
    const auto features = oracle::random_matrix(rng, 5, 3);
    const auto d = pairwise_distance(features, MetricId::Chebychev);
    for (auto method : {Method::Centroid, Method::Median, Method::Ward}) {
        CHECK_THROWS_AS(linkage(d, method, InputGeometry::NonEuclidean), IncompatibleMetric);
        CHECK_NOTHROW(linkage(d, method, InputGeometry::NonEuclidean, true));
    }
    CHECK_NOTHROW(linkage(d, Method::Average, InputGeometry::NonEuclidean));
}

TEST_CASE("ward height for two singletons is their euclidean distance") {
    Matrix m(2, 2);
    m.values = {0.0, 0.0, 3.0, 4.0};
    const auto d = pairwise_distance(m, MetricId::Euclidean);
    const auto tree = linkage(d, Method::Ward, InputGeometry::Euclidean);
    CHECK(tree.merges[0].height == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("centroid heights are distances between cluster centroids") {
    // two tight pairs far apart on a line: x = 0, 1, 10, 11
    Matrix m(4, 1);
    m.values = {0.0, 1.0, 10.0, 11.0};
    const auto d = pairwise_distance(m, MetricId::Euclidean);
    const auto tree = linkage(d, Method::Centroid, InputGeometry::Euclidean);
    REQUIRE(tree.merges.size() == 3);
    // centroids 0.5 and 10.5
    CHECK(tree.merges[2].height == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("linkage matches the naive definitional oracle across the whole grid") {
    std::mt19937_64 rng(2024);
    const std::vector<Method> methods{Method::Single,   Method::Complete, Method::Average,
                                      Method::Weighted, Method::Centroid, Method::Median,
                                      Method::Ward};
    const std::vector<Metric> metrics{MetricId::Euclidean,  MetricId::SquaredEuclidean,
                                      MetricId::SEuclidean, MetricId::CityBlock,
                                      Metric::minkowski(2), MetricId::Chebychev,
                                      MetricId::Cosine};
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 4 + rng() % 6;
        const auto features = oracle::random_matrix(rng, n, 3, 0.05, 1.0);
        for (const auto& metric : metrics) {
            const auto d = pairwise_distance(features, metric);
            for (auto method : methods) {
                const auto got = linkage(d, method, geometry_of(metric), true);
                const auto want = oracle::naive_linkage(features, method, metric);
                INFO("method=" << method_name(method) << " metric=" << metric_name(metric.id)
                               << " trial=" << trial);
                check_tree_equal(got, want);
            }
        }
    }
}

TEST_CASE("single-linkage merge heights equal the MST edge weights") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng() % 8;
        const auto features = oracle::random_matrix(rng, n, 2);
        const auto d = pairwise_distance(features, MetricId::Euclidean);
        const auto tree = linkage(d, Method::Single);
        std::vector<double> heights;
        for (const auto& m : tree.merges) heights.push_back(m.height);
        std::sort(heights.begin(), heights.end());
        const auto mst = oracle::mst_edge_weights(d);
        REQUIRE(heights.size() == mst.size());
        for (std::size_t i = 0; i < heights.size(); ++i)
            CHECK(heights[i] == doctest::Approx(mst[i]).epsilon(1e-9));
    }
}

TEST_CASE("permuting rows yields an isomorphic tree") {
    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 6;
        const auto features = oracle::random_matrix(rng, n, 3);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
        Matrix shuffled(n, 3);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(features.row(perm[i]).begin(), features.row(perm[i]).end(),
                      shuffled.row(i).begin());

        for (auto method : {Method::Single, Method::Average, Method::Ward}) {
            const auto t1 =
                linkage(pairwise_distance(features, MetricId::Euclidean), method);
            const auto t2 =
                linkage(pairwise_distance(shuffled, MetricId::Euclidean), method);
            std::vector<double> h1, h2;
            for (const auto& m : t1.merges) h1.push_back(m.height);
            for (const auto& m : t2.merges) h2.push_back(m.height);
            std::sort(h1.begin(), h1.end());
            std::sort(h2.begin(), h2.end());
            for (std::size_t i = 0; i < h1.size(); ++i)
                CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-9));

            // seed pairs coincide once mapped back through the permutation
            std::set<std::pair<std::size_t, std::size_t>> s1, s2;
            for (const auto& s : extract_seeds(t1)) s1.insert({s.left, s.right});
            for (const auto& s : extract_seeds(t2)) {
                std::size_t a = perm[s.left], b = perm[s.right];
                if (a > b) std::swap(a, b);
                s2.insert({a, b});
            }
            CHECK(s1 == s2);
        }
    }
}

TEST_CASE("linkage rejects degenerate input") {
    DistanceMatrix d;
    d.n = 1;
    CHECK_THROWS_AS(linkage(d, Method::Single), DegenerateData);
}

TEST_CASE("method names round-trip") {
    for (const char* name :
         {"single", "complete", "average", "weighted", "centroid", "median", "ward"})
        CHECK(method_name(method_from_name(name)) == std::string(name));
    CHECK_THROWS_AS(method_from_name("upgma"), ConfigError);
}
