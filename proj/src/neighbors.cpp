#include "lncmi/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lncmi/errors.hpp"

namespace lncmi {

namespace {

constexpr std::size_t kLeafSize = 64;

// Comparable distance: max-norm uses the distance itself, euclidean the square.
double comparable_dist(const Dataset& data, Metric metric, std::size_t a, std::size_t b) {
    const std::size_t d = data.d();
    if (metric == Metric::max_norm) {
        double m = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            m = std::max(m, std::abs(data.at(a, j) - data.at(b, j)));
        }
        return m;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = data.at(a, j) - data.at(b, j);
        s += diff * diff;
    }
    return s;
}

}  // namespace

SpatialIndex::SpatialIndex(const Dataset& data, Metric metric) : data_(&data), metric_(metric) {
    order_.resize(data.n());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * order_.size() / kLeafSize + 2);
    build(0, order_.size());
}

std::size_t SpatialIndex::build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    Node& node = nodes_.back();
    node.begin = begin;
    node.end = end;

    const std::size_t d = data_->d();
    node.lo.assign(d, std::numeric_limits<double>::infinity());
    node.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t p = begin; p < end; ++p) {
        for (std::size_t j = 0; j < d; ++j) {
            const double v = data_->at(order_[p], j);
            node.lo[j] = std::min(node.lo[j], v);
            node.hi[j] = std::max(node.hi[j], v);
        }
    }
    if (end - begin <= kLeafSize) return id;

    std::size_t dim = 0;
    double spread = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double s = node.hi[j] - node.lo[j];
        if (s > spread) {
            spread = s;
            dim = j;
        }
    }
    if (spread <= 0.0) return id;  // all points identical in the box

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                         const double va = data_->at(a, dim);
                         const double vb = data_->at(b, dim);
                         return va < vb || (va == vb && a < b);
                     });
    // nodes_ may reallocate during recursion; re-resolve the node afterwards.
    const std::size_t split_dim = dim;
    const double split_val = data_->at(order_[mid], dim);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].split_dim = split_dim;
    nodes_[id].split_val = split_val;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::vector<std::pair<double, std::size_t>> SpatialIndex::nearest(std::size_t i,
                                                                  std::size_t k) const {
    const Dataset& data = *data_;
    const std::size_t n = data.n();
    if (i >= n) throw error("point index out of range");
    if (k < 1 || k > n - 1) {
        throw error("knn: need 1 <= k <= n-1 (k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
    }
    const std::size_t d = data.d();

    // Max-heap of the best k (distance, index) pairs, worst on top.
    std::vector<std::pair<double, std::size_t>> heap;
    heap.reserve(k);
    const auto worse = [](const std::pair<double, std::size_t>& a,
                          const std::pair<double, std::size_t>& b) { return a < b; };

    const auto consider = [&](std::size_t cand) {
        if (cand == i) return;
        const std::pair<double, std::size_t> entry{comparable_dist(data, metric_, i, cand), cand};
        if (heap.size() < k) {
            heap.push_back(entry);
            std::push_heap(heap.begin(), heap.end(), worse);
        } else if (entry < heap.front()) {
            std::pop_heap(heap.begin(), heap.end(), worse);
            heap.back() = entry;
            std::push_heap(heap.begin(), heap.end(), worse);
        }
    };

    // Box distance lower bound in the comparable metric.
    const auto box_bound = [&](const Node& node) {
        double worst_axis = 0.0;
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = data.at(i, j);
            double gap = 0.0;
            if (v < node.lo[j]) {
                gap = node.lo[j] - v;
            } else if (v > node.hi[j]) {
                gap = v - node.hi[j];
            }
            worst_axis = std::max(worst_axis, gap);
            sq += gap * gap;
        }
        return metric_ == Metric::max_norm ? worst_axis : sq;
    };

    const auto search = [&](auto&& self, std::size_t node_id) -> void {
        const Node& node = nodes_[node_id];
        if (heap.size() == k && box_bound(node) > heap.front().first) return;
        if (node.left == 0) {
            for (std::size_t p = node.begin; p < node.end; ++p) consider(order_[p]);
            return;
        }
        const bool go_left_first = data.at(i, node.split_dim) <= node.split_val;
        self(self, go_left_first ? node.left : node.right);
        self(self, go_left_first ? node.right : node.left);
    };
    search(search, 0);

    std::sort(heap.begin(), heap.end());
    if (metric_ == Metric::euclidean) {
        for (auto& [dist, idx] : heap) dist = std::sqrt(dist);
    }
    return heap;
}

SortedAxes::SortedAxes(const Dataset& data) : data_(&data) {
    sorted_.resize(data.d());
    for (std::size_t j = 0; j < data.d(); ++j) {
        auto& col = sorted_[j];
        col.resize(data.n());
        for (std::size_t i = 0; i < data.n(); ++i) col[i] = data.at(i, j);
        std::sort(col.begin(), col.end());
    }
}

std::size_t SortedAxes::count_within(std::size_t i, std::size_t axis, double half_width,
                                     MarginalConvention convention) const {
    const auto& col = sorted_[axis];
    const double center = data_->at(i, axis);
    // fl(v - center) is monotone in v, so partition_point sees the exact same
    // per-element predicate as the linear scan.
    if (convention == MarginalConvention::final_inclusive) {
        const auto first = std::partition_point(col.begin(), col.end(),
                                                [&](double v) { return v - center < -half_width; });
        const auto last = std::partition_point(first, col.end(),
                                               [&](double v) { return v - center <= half_width; });
        return static_cast<std::size_t>(last - first) - 1;  // self always qualifies
    }
    const auto first = std::partition_point(col.begin(), col.end(),
                                            [&](double v) { return v - center <= -half_width; });
    const auto last = std::partition_point(first, col.end(),
                                           [&](double v) { return v - center < half_width; });
    std::size_t count = static_cast<std::size_t>(last - first);
    if (half_width > 0.0) --count;  // self inside the open interval
    return count;
}

std::size_t marginal_count(const Dataset& data, std::size_t i, std::size_t axis,
                           double half_width, MarginalConvention convention) {
    if (half_width < 0.0) throw error("marginal_count: half_width must be >= 0");
    std::size_t count = 0;
    for (std::size_t l = 0; l < data.n(); ++l) {
        if (l == i) continue;
        const double diff = std::abs(data.at(l, axis) - data.at(i, axis));
        if (convention == MarginalConvention::final_inclusive ? diff <= half_width
                                                              : diff < half_width) {
            ++count;
        }
    }
    return count;
}

namespace {

NeighborhoodInfo make_neighborhood(const SpatialIndex& index, std::size_t i, std::size_t k) {
    if (index.metric() != Metric::max_norm) {
        throw error("knn neighborhoods are defined under the max-norm metric");
    }
    const auto found = index.nearest(i, k);
    if (found.back().first == 0.0) throw zero_distance(i);

    const Dataset& data = index.data();
    NeighborhoodInfo info;
    info.center = i;
    info.neighbors.reserve(k);
    for (const auto& [dist, idx] : found) info.neighbors.push_back(idx);
    info.eps_max = 2.0 * found.back().first;
    info.axis_extents.assign(data.d(), 0.0);
    for (std::size_t l : info.neighbors) {
        for (std::size_t j = 0; j < data.d(); ++j) {
            info.axis_extents[j] =
                std::max(info.axis_extents[j], std::abs(data.at(l, j) - data.at(i, j)));
        }
    }
    for (double& e : info.axis_extents) e *= 2.0;
    return info;
}

}  // namespace

NeighborhoodInfo knn(const SpatialIndex& index, std::size_t i, std::size_t k) {
    return make_neighborhood(index, i, k);
}

NeighborhoodInfo knn(const SpatialIndex& index, const SortedAxes& axes, std::size_t i,
                     std::size_t k, MarginalConvention convention) {
    NeighborhoodInfo info = make_neighborhood(index, i, k);
    const std::size_t d = index.data().d();
    info.marginal_counts.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        info.marginal_counts[j] = axes.count_within(i, j, 0.5 * info.axis_extents[j], convention);
    }
    return info;
}

double knn_euclidean_radius(const SpatialIndex& index, std::size_t i, std::size_t k) {
    if (index.metric() != Metric::euclidean) {
        throw error("knn_euclidean_radius requires a euclidean index");
    }
    const auto found = index.nearest(i, k);
    if (found.back().first == 0.0) throw zero_distance(i);
    return found.back().first;
}

}  // namespace lncmi
