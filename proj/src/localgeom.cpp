#include "lncmi/localgeom.hpp"

#include <cmath>

#include "lncmi/errors.hpp"
#include "lncmi/mathcore.hpp"

namespace lncmi {

double axis_rect_volume(const NeighborhoodInfo& nbhd) {
    double v = 1.0;
    for (std::size_t j = 0; j < nbhd.axis_extents.size(); ++j) {
        if (nbhd.axis_extents[j] <= 0.0) throw degenerate_axis(j);
        v *= nbhd.axis_extents[j];
    }
    return v;
}

std::pair<double, bool> pca_rect_volume_from_offsets(std::span<const double> offsets,
                                                     std::size_t n_pts, std::size_t d) {
    if (n_pts < 1 || offsets.size() != n_pts * d) throw error("pca_rect_volume: bad offsets");

    // Second-moment matrix about the designated center.
    std::vector<double> m(d * d, 0.0);
    for (std::size_t l = 0; l < n_pts; ++l) {
        const double* o = offsets.data() + l * d;
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = r; c < d; ++c) m[r * d + c] += o[r] * o[c];
        }
    }
    const double inv_k = 1.0 / static_cast<double>(n_pts);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r; c < d; ++c) {
            m[r * d + c] *= inv_k;
            m[c * d + r] = m[r * d + c];
        }
    }

    const SymmetricEigenResult eig = eigh(m, d);

    std::vector<double> extent(d, 0.0);
    for (std::size_t l = 0; l < n_pts; ++l) {
        const double* o = offsets.data() + l * d;
        for (std::size_t q = 0; q < d; ++q) {
            double z = 0.0;
            for (std::size_t r = 0; r < d; ++r) z += o[r] * eig.vec(r, q);
            extent[q] = std::max(extent[q], std::abs(z));
        }
    }

    double v = 1.0;
    bool rank_deficient = false;
    for (std::size_t q = 0; q < d; ++q) {
        const double e = 2.0 * extent[q];
        if (e == 0.0) rank_deficient = true;
        v *= e;
    }
    return {v, rank_deficient};
}

std::pair<double, bool> pca_rect_volume(const Dataset& data, const NeighborhoodInfo& nbhd) {
    const std::size_t d = data.d();
    const std::size_t k = nbhd.neighbors.size();
    std::vector<double> offsets(k * d);
    for (std::size_t l = 0; l < k; ++l) {
        const std::size_t idx = nbhd.neighbors[l];
        for (std::size_t j = 0; j < d; ++j) {
            offsets[l * d + j] = data.at(idx, j) - data.at(nbhd.center, j);
        }
    }
    return pca_rect_volume_from_offsets(offsets, k, d);
}

LocalVolumes local_volumes(const Dataset& data, const NeighborhoodInfo& nbhd) {
    LocalVolumes out;
    out.v_axis = axis_rect_volume(nbhd);
    const auto [v_pca, deficient] = pca_rect_volume(data, nbhd);
    out.v_pca = v_pca;
    out.rank_deficient = deficient;
    out.ratio = out.v_pca / out.v_axis;
    return out;
}

}  // namespace lncmi
