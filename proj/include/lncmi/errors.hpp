#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lncmi {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV cell that failed numeric parsing; row/col are 1-based (header = row 1).
struct parse_error : error {
    parse_error(const std::string& msg, std::size_t row, std::size_t col)
        : error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};

struct insufficient_samples : error {
    insufficient_samples(std::size_t effective, std::size_t required)
        : error("insufficient samples: " + std::to_string(effective) + " complete rows, " +
                std::to_string(required) + " required"),
          effective(effective), required(required) {}
    std::size_t effective;
    std::size_t required;
};

// k-th neighbor at distance exactly zero; caller should jitter or deduplicate.
struct zero_distance : error {
    explicit zero_distance(std::size_t point)
        : error("duplicate points: k-th neighbor of point " + std::to_string(point) +
                " is at distance 0; enable jitter or deduplicate the input"),
          point(point) {}
    std::size_t point;
};

struct dimension_too_small : error {
    explicit dimension_too_small(std::size_t d)
        : error("need at least 2 dimensions, got " + std::to_string(d)), d(d) {}
    std::size_t d;
};

struct alpha_unavailable : error {
    alpha_unavailable(std::size_t k, std::size_t d)
        : error("no calibrated alpha for k=" + std::to_string(k) + ", d=" + std::to_string(d) +
                "; pass --alpha, point --alpha-table at a table covering this pair, or run calibrate"),
          k(k), d(d) {}
    std::size_t k;
    std::size_t d;
};

struct degenerate_axis : error {
    explicit degenerate_axis(std::size_t axis)
        : error("axis " + std::to_string(axis) +
                " has zero extent: all k neighbors share this coordinate with the center"),
          axis(axis) {}
    std::size_t axis;
};

}  // namespace lncmi
