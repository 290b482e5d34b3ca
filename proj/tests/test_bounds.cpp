#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lncmi/bounds.hpp"
#include "lncmi/errors.hpp"

using namespace lncmi;

TEST_CASE("ksg lower bound formula") {
    // I=5, eps=0.1, d=2, k=1: e^0 * e^4.9 + 1.
    CHECK(ksg_sample_lower_bound({5.0, 0.1, 2, 1}) ==
          doctest::Approx(std::exp(4.9) + 1.0).epsilon(1e-12));
    // I = eps collapses the exponent.
    CHECK(ksg_sample_lower_bound({0.3, 0.3, 4, 3}) ==
          doctest::Approx(std::exp(-2.0 / 3.0) + 1.0).epsilon(1e-12));
    // k -> infinity drives the constant to e^-1.
    CHECK(ksg_sample_lower_bound({1.0, 1.0, 2, 1000000000}) ==
          doctest::Approx(std::exp(-1.0) + 1.0).epsilon(1e-6));
}

TEST_CASE("knn lower bound: default O(1/d) constant and override") {
    CHECK(knn_sample_lower_bound({5.0, 0.1, 2, 1}, 1.0) ==
          doctest::Approx(std::exp(4.9) + 1.0).epsilon(1e-12));
    CHECK(knn_sample_lower_bound({5.0, 0.1, 2, 1}) ==
          doctest::Approx(0.5 * std::exp(4.9) + 1.0).epsilon(1e-12));
    CHECK(knn_sample_lower_bound({0.7, 0.7, 5, 2}, 3.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("bound monotonicities") {
    double prev = 0.0;
    for (double i_true : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double b = ksg_sample_lower_bound({i_true, 0.1, 2, 1});
        CHECK(b > prev);
        prev = b;
    }
    CHECK(ksg_sample_lower_bound({3.0, 0.5, 2, 1}) < ksg_sample_lower_bound({3.0, 0.1, 2, 1}));
    CHECK(ksg_sample_lower_bound({3.0, 0.1, 4, 1}) < ksg_sample_lower_bound({3.0, 0.1, 2, 1}));
}

TEST_CASE("estimate upper bound values") {
    CHECK(ksg_estimate_upper_bound(5001, 5, 2) ==
          doctest::Approx(std::log(5000.0) + 0.8).epsilon(1e-12));
    CHECK(ksg_estimate_upper_bound(101, 1, 3) == doctest::Approx(2.0 * std::log(100.0)));
}

TEST_CASE("invalid queries rejected") {
    CHECK_THROWS_AS(ksg_sample_lower_bound({1.0, 0.1, 1, 1}), dimension_too_small);
    CHECK_THROWS_AS(ksg_sample_lower_bound({1.0, -0.1, 2, 1}), error);
    CHECK_THROWS_AS(ksg_sample_lower_bound({1.0, 0.1, 2, 0}), error);
    CHECK_THROWS_AS(ksg_estimate_upper_bound(1, 1, 2), error);
}
