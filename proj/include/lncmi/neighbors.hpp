#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lncmi/dataset.hpp"

namespace lncmi {

enum class Metric { max_norm, euclidean };

// Marginal count boundary convention. The published form counts with an
// inclusive boundary and feeds psi(n); the earlier draft used a strict
// boundary and psi(n + 1).
enum class MarginalConvention { final_inclusive, draft_strict };

struct NeighborhoodInfo {
    std::size_t center = 0;
    std::vector<std::size_t> neighbors;      // k indices, ascending (distance, index)
    double eps_max = 0.0;                    // twice the max-norm distance to the k-th neighbor
    std::vector<double> axis_extents;        // per axis, 2 * max |x_l_j - x_i_j| over neighbors
    std::vector<std::size_t> marginal_counts;  // n_xj(i); filled when axes are supplied
};

// Exact k-nearest-neighbor queries. Balanced kd-tree with brute-force leaves;
// equal distances break toward the smaller point index. Immutable after
// construction, safe for concurrent queries.
class SpatialIndex {
public:
    SpatialIndex(const Dataset& data, Metric metric);

    Metric metric() const { return metric_; }
    const Dataset& data() const { return *data_; }

    // k nearest neighbors of point i, self excluded, sorted ascending by
    // (distance, index). Requires k <= n - 1.
    std::vector<std::pair<double, std::size_t>> nearest(std::size_t i, std::size_t k) const;

private:
    struct Node {
        std::size_t begin, end;      // range in order_
        std::size_t split_dim = 0;
        double split_val = 0.0;
        std::size_t left = 0, right = 0;  // child node ids; 0 = leaf
        std::vector<double> lo, hi;       // bounding box
    };

    std::size_t build(std::size_t begin, std::size_t end);
    const Dataset* data_;
    Metric metric_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

// Per-axis sorted values for marginal range counts in O(log n) per query.
class SortedAxes {
public:
    explicit SortedAxes(const Dataset& data);
    // |{ l != i : |x_l_j - x_i_j| <= half_width }| (final convention) or with
    // strict < (draft). Matches the element-wise subtraction used for axis
    // extents, so the count can never miss the achieving neighbor.
    std::size_t count_within(std::size_t i, std::size_t axis, double half_width,
                             MarginalConvention convention) const;

private:
    const Dataset* data_;
    std::vector<std::vector<double>> sorted_;
};

// k neighbors plus rectangle geometry; marginal_counts left empty.
NeighborhoodInfo knn(const SpatialIndex& index, std::size_t i, std::size_t k);

// Same, with n_xj(i) filled from the axes under the given convention.
NeighborhoodInfo knn(const SpatialIndex& index, const SortedAxes& axes, std::size_t i,
                     std::size_t k, MarginalConvention convention);

// Reference linear-scan marginal count (final convention boundary unless
// stated otherwise).
std::size_t marginal_count(const Dataset& data, std::size_t i, std::size_t axis,
                           double half_width,
                           MarginalConvention convention = MarginalConvention::final_inclusive);

// Euclidean distance from point i to its k-th nearest neighbor; the index must
// use the euclidean metric.
double knn_euclidean_radius(const SpatialIndex& index, std::size_t i, std::size_t k);

}  // namespace lncmi
