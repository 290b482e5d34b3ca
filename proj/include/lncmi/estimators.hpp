#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lncmi/calibration.hpp"
#include "lncmi/dataset.hpp"
#include "lncmi/neighbors.hpp"

namespace lncmi {

// All estimators work in nats.
struct EstimatorConfig {
    std::size_t k = 5;
    // Explicit nonuniformity threshold; when absent, alpha_table is consulted
    // for (k, d) and a missing entry raises alpha_unavailable.
    std::optional<double> alpha;
    const AlphaTable* alpha_table = nullptr;
    MarginalConvention convention = MarginalConvention::final_inclusive;
    double ratio_floor = 1e-15;  // minimal admitted v_pca / v_axis before the log
    int threads = 1;
};

struct MIEstimate {
    double value = 0.0;
    // LNC only: the applied per-point corrections, in point order.
    std::optional<std::vector<double>> per_point_corrections;
    double corrected_fraction = 0.0;  // points with a nonzero correction
    std::size_t floored_count = 0;    // points whose ratio hit ratio_floor
};

// Kozachenko-Leonenko style entropy from Euclidean k-NN distances:
// -(1/n) sum log p_hat_k with p_hat_k = k/(n-1) * 1/c_d * r_k^-d; subtracting
// gamma_k makes it asymptotically unbiased.
double entropy_knn_naive(const Dataset& data, std::size_t k, bool bias_corrected,
                         int threads = 1);

// Naive kNN MI: joint density estimate over marginal estimates (same k in
// every subspace, L2 in the joint, absolute distance in the marginals),
// debiased by (d-1) gamma_k.
MIEstimate mi_knn_naive(const Dataset& data, std::size_t k, int threads = 1);

// Max-norm entropy: psi(N) - psi(k) + (d/N) sum log eps_{i,k}.
double entropy_ksg(const Dataset& data, std::size_t k, int threads = 1);

// (d-1) psi(N) + psi(k) - (d-1)/k - (1/N) sum_i sum_j psi(n_xj(i)).
MIEstimate mi_ksg(const Dataset& data, const EstimatorConfig& cfg);

// KSG plus the local nonuniformity correction: per point, if the PCA-aligned
// rectangle shrinks the max-norm rectangle below alpha, subtract the mean of
// log(v_pca / v_axis). Never below the KSG value.
MIEstimate mi_lnc(const Dataset& data, const EstimatorConfig& cfg);

// Generic mass-over-volume ratio form of kNN MI estimators. Substituting the
// corrected joint volume reproduces the LNC correction identity:
//   value(corrected) = value(uncorrected) - (1/N) sum log(corrected/joint).
struct RatioFormTerms {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> joint_mass;        // P_i, size n
    std::vector<double> joint_volume;      // V_i, size n
    std::vector<double> corrected_volume;  // V-bar_i, size n
    std::vector<double> marginal_mass;     // n x d row-major
    std::vector<double> marginal_volume;   // n x d row-major
};

double mi_generic_ratio(const RatioFormTerms& terms);

}  // namespace lncmi
