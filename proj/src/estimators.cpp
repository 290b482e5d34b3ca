#include "lncmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "lncmi/errors.hpp"
#include "lncmi/localgeom.hpp"
#include "lncmi/mathcore.hpp"
#include "lncmi/parallel.hpp"

namespace lncmi {

namespace {

// Runs fn(i) for every point, capturing the first worker exception and
// rethrowing it on the calling thread.
template <typename Fn>
void for_each_point(std::size_t n, int threads, Fn&& fn) {
    std::exception_ptr failure;
    std::mutex mu;
    parallel_for(n, threads, [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
}

void require_config(const EstimatorConfig& cfg) {
    if (cfg.k < 1) throw error("estimator config: k must be >= 1");
    if (cfg.ratio_floor <= 0.0) throw error("estimator config: ratio_floor must be > 0");
    if (cfg.alpha && (*cfg.alpha < 0.0 || *cfg.alpha > 1.0)) {
        throw error("estimator config: alpha must lie in [0, 1]");
    }
}

// Per-axis sorted values plus each point's position, for 1-D k-NN radii.
struct MarginalRadii {
    explicit MarginalRadii(const Dataset& data) : d(data.d()) {
        const std::size_t n = data.n();
        sorted.assign(d, std::vector<double>(n));
        pos.assign(d, std::vector<std::size_t>(n));
        std::vector<std::size_t> order(n);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = data.at(a, j);
                const double vb = data.at(b, j);
                return va < vb || (va == vb && a < b);
            });
            for (std::size_t r = 0; r < n; ++r) {
                sorted[j][r] = data.at(order[r], j);
                pos[j][order[r]] = r;
            }
        }
    }

    // k-th smallest |x_l_j - x_i_j| over l != i, by expanding a window around
    // the point's sorted position.
    double radius(std::size_t i, std::size_t j, std::size_t k) const {
        const auto& col = sorted[j];
        const std::size_t n = col.size();
        std::size_t p = pos[j][i];
        const double center = col[p];
        std::size_t left = p;          // next candidate on the left is left-1
        std::size_t right = p + 1;     // next candidate on the right
        double dist = 0.0;
        for (std::size_t step = 0; step < k; ++step) {
            const double dl =
                left > 0 ? center - col[left - 1] : std::numeric_limits<double>::infinity();
            const double dr =
                right < n ? col[right] - center : std::numeric_limits<double>::infinity();
            if (dl <= dr) {
                dist = dl;
                --left;
            } else {
                dist = dr;
                ++right;
            }
        }
        return dist;
    }

    std::size_t d;
    std::vector<std::vector<double>> sorted;
    std::vector<std::vector<std::size_t>> pos;
};

}  // namespace

double entropy_knn_naive(const Dataset& data, std::size_t k, bool bias_corrected, int threads) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (n < k + 1) throw error("entropy_knn_naive: need n >= k+1");

    const SpatialIndex index(data, Metric::euclidean);
    std::vector<double> terms(n);
    for_each_point(n, threads, [&](std::size_t i) {
        terms[i] = std::log(knn_euclidean_radius(index, i, k));
    });

    const double mean_log_r = deterministic_sum(std::move(terms)) / static_cast<double>(n);
    double h = std::log(static_cast<double>(n - 1) / static_cast<double>(k)) +
               std::log(unit_ball_volume_coeff(d)) + static_cast<double>(d) * mean_log_r;
    if (bias_corrected) h -= gamma_k(k);
    return h;
}

MIEstimate mi_knn_naive(const Dataset& data, std::size_t k, int threads) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (d < 2) throw dimension_too_small(d);
    if (n < k + 1) throw error("mi_knn_naive: need n >= k+1");

    const SpatialIndex index(data, Metric::euclidean);
    const MarginalRadii marginals(data);

    std::vector<double> terms(n);
    for_each_point(n, threads, [&](std::size_t i) {
        const double r_joint = knn_euclidean_radius(index, i, k);
        double sum_log_marginal = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double r = marginals.radius(i, j, k);
            if (r == 0.0) throw zero_distance(i);
            sum_log_marginal += std::log(r);
        }
        terms[i] = sum_log_marginal - static_cast<double>(d) * std::log(r_joint);
    });

    // Constant part of log[p_hat(joint) / prod_j p_hat(marginal_j)].
    const double log_k_ratio =
        -(static_cast<double>(d) - 1.0) * std::log(static_cast<double>(k) /
                                                   static_cast<double>(n - 1));
    const double log_volume_coeff = -std::log(unit_ball_volume_coeff(d)) +
                                    static_cast<double>(d) * std::log(unit_ball_volume_coeff(1));

    MIEstimate out;
    out.value = log_k_ratio + log_volume_coeff +
                deterministic_sum(std::move(terms)) / static_cast<double>(n) -
                (static_cast<double>(d) - 1.0) * gamma_k(k);
    return out;
}

double entropy_ksg(const Dataset& data, std::size_t k, int threads) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    if (n < k + 1) throw error("entropy_ksg: need n >= k+1");

    const SpatialIndex index(data, Metric::max_norm);
    std::vector<double> terms(n);
    for_each_point(n, threads, [&](std::size_t i) {
        terms[i] = std::log(knn(index, i, k).eps_max);
    });
    return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
           static_cast<double>(d) * deterministic_sum(std::move(terms)) /
               static_cast<double>(n);
}

namespace {

struct KsgPointTerms {
    std::vector<double> psi_terms;  // sum_j psi(n_xj(i)) per point
    std::vector<double> lnc_terms;  // applied LNC_i per point (zeros when not applied)
    std::size_t floored = 0;
    std::size_t corrected = 0;
};

KsgPointTerms ksg_point_terms(const Dataset& data, const EstimatorConfig& cfg, bool with_lnc,
                              double alpha) {
    const std::size_t n = data.n();
    const std::size_t d = data.d();
    const SpatialIndex index(data, Metric::max_norm);
    const SortedAxes axes(data);

    KsgPointTerms out;
    out.psi_terms.assign(n, 0.0);
    if (with_lnc) out.lnc_terms.assign(n, 0.0);
    std::vector<std::size_t> floored(with_lnc ? n : 0, 0);
    std::vector<std::size_t> corrected(with_lnc ? n : 0, 0);

    for_each_point(n, cfg.threads, [&](std::size_t i) {
        const NeighborhoodInfo nbhd = knn(index, axes, i, cfg.k, cfg.convention);
        double s = 0.0;
        const double shift = cfg.convention == MarginalConvention::draft_strict ? 1.0 : 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            s += digamma(static_cast<double>(nbhd.marginal_counts[j]) + shift);
        }
        out.psi_terms[i] = s;

        if (with_lnc) {
            const LocalVolumes vol = local_volumes(data, nbhd);
            if (vol.ratio < alpha) {
                double ratio = vol.ratio;
                if (ratio < cfg.ratio_floor) {
                    ratio = cfg.ratio_floor;
                    floored[i] = 1;
                }
                out.lnc_terms[i] = std::log(ratio);
                corrected[i] = 1;
            }
        }
    });

    for (std::size_t f : floored) out.floored += f;
    for (std::size_t c : corrected) out.corrected += c;
    return out;
}

double ksg_value_from_terms(const Dataset& data, const EstimatorConfig& cfg,
                            std::vector<double> psi_terms) {
    const double n = static_cast<double>(data.n());
    const double d = static_cast<double>(data.d());
    return (d - 1.0) * digamma(n) + digamma(static_cast<double>(cfg.k)) -
           (d - 1.0) / static_cast<double>(cfg.k) -
           deterministic_sum(std::move(psi_terms)) / n;
}

void require_mi_input(const Dataset& data, const EstimatorConfig& cfg) {
    require_config(cfg);
    if (data.d() < 2) throw dimension_too_small(data.d());
    if (data.n() < cfg.k + 1) throw error("mi estimator: need n >= k+1");
}

}  // namespace

MIEstimate mi_ksg(const Dataset& data, const EstimatorConfig& cfg) {
    require_mi_input(data, cfg);
    KsgPointTerms terms = ksg_point_terms(data, cfg, /*with_lnc=*/false, 0.0);
    MIEstimate out;
    out.value = ksg_value_from_terms(data, cfg, std::move(terms.psi_terms));
    return out;
}

MIEstimate mi_lnc(const Dataset& data, const EstimatorConfig& cfg) {
    require_mi_input(data, cfg);
    double alpha;
    if (cfg.alpha) {
        alpha = *cfg.alpha;
    } else if (cfg.alpha_table) {
        alpha = cfg.alpha_table->lookup(cfg.k, data.d());
    } else {
        throw alpha_unavailable(cfg.k, data.d());
    }
    if (alpha < 0.0 || alpha > 1.0) throw error("alpha must lie in [0, 1]");

    KsgPointTerms terms = ksg_point_terms(data, cfg, /*with_lnc=*/true, alpha);
    MIEstimate out;
    out.value = ksg_value_from_terms(data, cfg, std::move(terms.psi_terms)) -
                deterministic_sum(terms.lnc_terms) / static_cast<double>(data.n());
    out.corrected_fraction =
        static_cast<double>(terms.corrected) / static_cast<double>(data.n());
    out.floored_count = terms.floored;
    out.per_point_corrections = std::move(terms.lnc_terms);
    return out;
}

double mi_generic_ratio(const RatioFormTerms& terms) {
    const std::size_t n = terms.n;
    const std::size_t d = terms.d;
    if (n == 0 || terms.joint_mass.size() != n || terms.joint_volume.size() != n ||
        terms.corrected_volume.size() != n || terms.marginal_mass.size() != n * d ||
        terms.marginal_volume.size() != n * d) {
        throw error("mi_generic_ratio: inconsistent term sizes");
    }
    std::vector<double> point_terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (terms.joint_volume[i] <= 0.0 || terms.corrected_volume[i] <= 0.0) {
            throw error("mi_generic_ratio: volumes must be positive");
        }
        double t = std::log(terms.joint_mass[i] / terms.corrected_volume[i]);
        for (std::size_t j = 0; j < d; ++j) {
            if (terms.marginal_volume[i * d + j] <= 0.0) {
                throw error("mi_generic_ratio: volumes must be positive");
            }
            t -= std::log(terms.marginal_mass[i * d + j] / terms.marginal_volume[i * d + j]);
        }
        point_terms[i] = t;
    }
    return deterministic_sum(std::move(point_terms)) / static_cast<double>(n);
}

}  // namespace lncmi
