#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "lncmi/errors.hpp"

namespace lncmi {

struct BoundQuery {
    double i_true = 0.0;  // nats
    double epsilon = 0.0;
    std::size_t d = 2;
    std::size_t k = 1;
};

inline void validate(const BoundQuery& q) {
    if (q.d < 2) throw dimension_too_small(q.d);
    if (q.epsilon < 0.0) throw error("bound query: epsilon must be >= 0");
    if (q.k < 1) throw error("bound query: k must be >= 1");
}

// Minimum sample count for the KSG estimator to reach I - epsilon:
// e^{-(k-1)/k} * exp((I - eps)/(d - 1)) + 1.
inline double ksg_sample_lower_bound(const BoundQuery& q) {
    validate(q);
    const double c = std::exp(-(static_cast<double>(q.k) - 1.0) / static_cast<double>(q.k));
    return c * std::exp((q.i_true - q.epsilon) / (static_cast<double>(q.d) - 1.0)) + 1.0;
}

// Same shape for the naive kNN estimator. The constant is only
// order-specified (O(1/d)); the default 1/d stands in for it and can be
// overridden.
inline double knn_sample_lower_bound(const BoundQuery& q,
                                     std::optional<double> c_override = std::nullopt) {
    validate(q);
    const double c = c_override ? *c_override : 1.0 / static_cast<double>(q.d);
    return c * std::exp((q.i_true - q.epsilon) / (static_cast<double>(q.d) - 1.0)) + 1.0;
}

// Hard cap on any KSG estimate: (d-1) * (log(N-1) + (k-1)/k).
inline double ksg_estimate_upper_bound(std::size_t n, std::size_t k, std::size_t d) {
    if (n < 2) throw error("ksg_estimate_upper_bound: need N >= 2");
    if (k < 1) throw error("ksg_estimate_upper_bound: k must be >= 1");
    return (static_cast<double>(d) - 1.0) *
           (std::log(static_cast<double>(n - 1)) +
            (static_cast<double>(k) - 1.0) / static_cast<double>(k));
}

}  // namespace lncmi
