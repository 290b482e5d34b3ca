#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "lncmi/dataset.hpp"
#include "lncmi/errors.hpp"
#include "lncmi/neighbors.hpp"

using namespace lncmi;

namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> vals(n * d);
    for (double& v : vals) v = u(gen);
    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) names[j] = "c" + std::to_string(j);
    return Dataset(std::move(vals), std::move(names));
}

// Brute-force oracle: full pairwise scan with (distance, index) ordering.
std::vector<std::pair<double, std::size_t>> brute_knn(const Dataset& data, Metric metric,
                                                      std::size_t i, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t l = 0; l < data.n(); ++l) {
        if (l == i) continue;
        double dist = 0.0;
        if (metric == Metric::max_norm) {
            for (std::size_t j = 0; j < data.d(); ++j) {
                dist = std::max(dist, std::abs(data.at(l, j) - data.at(i, j)));
            }
        } else {
            for (std::size_t j = 0; j < data.d(); ++j) {
                const double diff = data.at(l, j) - data.at(i, j);
                dist += diff * diff;
            }
            dist = std::sqrt(dist);
        }
        all.emplace_back(dist, l);
    }
    std::sort(all.begin(), all.end());
    all.resize(k);
    return all;
}

}  // namespace

TEST_CASE("1-D hand example") {
    const Dataset data({0.0, 1.0, 3.0}, {"x"});
    const SpatialIndex index(data, Metric::max_norm);
    const NeighborhoodInfo nb = knn(index, 0, 2);
    CHECK(nb.neighbors == std::vector<std::size_t>{1, 2});
    CHECK(nb.eps_max == doctest::Approx(6.0));
    REQUIRE(nb.axis_extents.size() == 1);
    CHECK(nb.axis_extents[0] == doctest::Approx(6.0));
}

TEST_CASE("2-D hand example under max-norm") {
    const Dataset data({0, 0, 1, 0, 0, 2}, {"x", "y"});
    const SpatialIndex index(data, Metric::max_norm);
    const NeighborhoodInfo nb = knn(index, 0, 2);
    CHECK(nb.eps_max == doctest::Approx(4.0));
    CHECK(nb.axis_extents[0] == doctest::Approx(2.0));
    CHECK(nb.axis_extents[1] == doctest::Approx(4.0));
    // max_j extent = eps invariant
    CHECK(*std::max_element(nb.axis_extents.begin(), nb.axis_extents.end()) ==
          doctest::Approx(nb.eps_max));
}

TEST_CASE("500 random points match the brute-force oracle") {
    const Dataset data = random_dataset(500, 3, 99);
    for (Metric metric : {Metric::max_norm, Metric::euclidean}) {
        const SpatialIndex index(data, metric);
        for (std::size_t i : {0ul, 17ul, 250ul, 499ul}) {
            const auto got = index.nearest(i, 5);
            const auto want = brute_knn(data, metric, i, 5);
            REQUIRE(got.size() == want.size());
            for (std::size_t t = 0; t < got.size(); ++t) {
                CHECK(got[t].second == want[t].second);
                CHECK(got[t].first == doctest::Approx(want[t].first).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("index equals brute force across random instances, both metrics") {
    std::mt19937_64 gen(1234);
    for (int rep = 0; rep < 12; ++rep) {
        const std::size_t n = 50 + static_cast<std::size_t>(gen() % 1950);
        const std::size_t d = 1 + static_cast<std::size_t>(gen() % 4);
        const Dataset data = random_dataset(n, d, gen());
        const std::size_t k = 1 + static_cast<std::size_t>(gen() % 8);
        for (Metric metric : {Metric::max_norm, Metric::euclidean}) {
            const SpatialIndex index(data, metric);
            for (int probe = 0; probe < 10; ++probe) {
                const std::size_t i = gen() % n;
                const auto got = index.nearest(i, k);
                const auto want = brute_knn(data, metric, i, k);
                for (std::size_t t = 0; t < k; ++t) CHECK(got[t].second == want[t].second);
            }
        }
    }
}

TEST_CASE("ties break toward the smaller point index") {
    // Points 1 and 2 are equidistant from point 0.
    const Dataset data({0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 5.0, 5.0}, {"x", "y"});
    const SpatialIndex index(data, Metric::max_norm);
    const auto got = index.nearest(0, 1);
    CHECK(got[0].second == 1);
}

TEST_CASE("k monotonicity: k+1 neighborhood contains the k neighborhood") {
    const Dataset data = random_dataset(300, 2, 5);
    const SpatialIndex index(data, Metric::max_norm);
    for (std::size_t i : {3ul, 77ul}) {
        for (std::size_t k = 1; k < 12; ++k) {
            const auto small = index.nearest(i, k);
            const auto big = index.nearest(i, k + 1);
            std::set<std::size_t> big_set;
            for (const auto& [dist, idx] : big) big_set.insert(idx);
            for (const auto& [dist, idx] : small) CHECK(big_set.count(idx) == 1);
        }
    }
}

TEST_CASE("marginal_count hand examples") {
    const Dataset data({0.0, 0.5, 1.0, 2.0}, {"x"});
    CHECK(marginal_count(data, 0, 0, 1.0) == 2);
    CHECK(marginal_count(data, 0, 0, 0.0) == 0);
    // strict convention excludes the boundary point
    CHECK(marginal_count(data, 0, 0, 1.0, MarginalConvention::draft_strict) == 1);
}

TEST_CASE("sorted-axes counts equal the linear scan") {
    const Dataset data = random_dataset(1000, 2, 31);
    const SortedAxes axes(data);
    const SpatialIndex index(data, Metric::max_norm);
    std::mt19937_64 gen(8);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t i = gen() % data.n();
        const NeighborhoodInfo nb = knn(index, i, 4);
        for (std::size_t j = 0; j < data.d(); ++j) {
            const double half = 0.5 * nb.axis_extents[j];
            for (MarginalConvention c :
                 {MarginalConvention::final_inclusive, MarginalConvention::draft_strict}) {
                CHECK(axes.count_within(i, j, half, c) == marginal_count(data, i, j, half, c));
            }
        }
    }
}

TEST_CASE("n_xj(i) >= k under the final convention") {
    const Dataset data = random_dataset(400, 3, 77);
    const SpatialIndex index(data, Metric::max_norm);
    const SortedAxes axes(data);
    for (std::size_t i = 0; i < data.n(); i += 13) {
        const NeighborhoodInfo nb = knn(index, axes, i, 6, MarginalConvention::final_inclusive);
        for (std::size_t j = 0; j < data.d(); ++j) CHECK(nb.marginal_counts[j] >= 6);
    }
}

TEST_CASE("euclidean radii: 3-4-5 example and oracle") {
    const Dataset data({0, 0, 3, 4, 6, 8}, {"x", "y"});
    const SpatialIndex index(data, Metric::euclidean);
    CHECK(knn_euclidean_radius(index, 0, 1) == doctest::Approx(5.0));
    CHECK(knn_euclidean_radius(index, 0, 2) == doctest::Approx(10.0));

    const Dataset rnd = random_dataset(400, 2, 55);
    const SpatialIndex ridx(rnd, Metric::euclidean);
    for (std::size_t i : {1ul, 100ul, 399ul}) {
        const auto want = brute_knn(rnd, Metric::euclidean, i, 3);
        CHECK(knn_euclidean_radius(ridx, i, 3) == doctest::Approx(want.back().first));
    }
}

TEST_CASE("duplicates raise zero_distance; bad k rejected") {
    const Dataset data({1.0, 2.0, 1.0, 2.0, 9.0, 9.0}, {"x", "y"});
    const SpatialIndex index(data, Metric::max_norm);
    CHECK_THROWS_AS(knn(index, 0, 1), zero_distance);
    CHECK_THROWS_AS(index.nearest(0, 3), error);  // k > n-1
    CHECK_THROWS_AS(index.nearest(0, 0), error);
}
