#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lncmi/dataset.hpp"
#include "lncmi/neighbors.hpp"

namespace lncmi {

// Identifies the extent/centering convention baked into the volumes below.
// Alpha tables calibrated under a different convention must not be reused.
inline constexpr const char* kLocalGeomConvention = "centered-sym-v1";

struct LocalVolumes {
    double v_axis = 0.0;       // product of the axis extents of the max-norm rectangle
    double v_pca = 0.0;        // product of PCA-aligned extents, 2*max|z| per axis
    double ratio = 0.0;        // v_pca / v_axis before any flooring
    bool rank_deficient = false;  // some PCA extent is exactly zero
};

// Product of the d axis extents; throws degenerate_axis if any extent is 0.
double axis_rect_volume(const NeighborhoodInfo& nbhd);

// PCA-aligned rectangle volume about a designated center. The second-moment
// matrix of the offsets is used directly (no mean subtraction: the center is
// forced to be the rectangle's center), extents are 2*max|z| per principal
// axis. Rank deficiency is reported, not thrown.
// offsets: n_pts x d row-major, already relative to the center.
std::pair<double, bool> pca_rect_volume_from_offsets(std::span<const double> offsets,
                                                     std::size_t n_pts, std::size_t d);

std::pair<double, bool> pca_rect_volume(const Dataset& data, const NeighborhoodInfo& nbhd);

LocalVolumes local_volumes(const Dataset& data, const NeighborhoodInfo& nbhd);

}  // namespace lncmi
