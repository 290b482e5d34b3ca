// Acceptance suite: run `acceptance <criterion>` for one criterion (1-7) or
// `acceptance all`. Prints one PASS/FAIL line per criterion and exits
// nonzero if any checked criterion failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lncmi/bounds.hpp"
#include "lncmi/calibration.hpp"
#include "lncmi/dataset.hpp"
#include "lncmi/estimators.hpp"
#include "lncmi/experiments.hpp"
#include "lncmi/localgeom.hpp"
#include "lncmi/mathcore.hpp"
#include "lncmi/neighbors.hpp"
#include "lncmi/synthgen.hpp"

using namespace lncmi;

namespace {

constexpr int kThreads = 2;

struct Checker {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.tellp() > 0 ? "; " : "") << what;
        }
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

double mean_over_seeds(std::size_t seeds, std::uint64_t base,
                       const std::function<double(std::uint64_t)>& fn) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < seeds; ++s) acc += fn(base + s);
    return acc / static_cast<double>(seeds);
}

Dataset make(Family family, double sigma, std::size_t n, std::uint64_t seed, double rho = 0.0) {
    RelationshipSpec spec;
    spec.family = family;
    spec.noise_sigma = sigma;
    spec.n = n;
    spec.seed = seed;
    spec.rho = rho;
    return generate(spec);
}

// Criterion 1: alpha calibration reproduction at the published defaults.
bool criterion1() {
    Checker c;
    const double a52 = estimate_alpha(5, 2, 500000, 5e-3, 20200817, kThreads);
    const double a85 = estimate_alpha(8, 5, 500000, 5e-3, 20200817, kThreads);
    c.expect(std::abs(a52 - 0.37) <= 0.02,
             "alpha(5,2) = " + fmt(a52) + " outside 0.37 +/- 0.02");
    c.expect(std::abs(a85 - 0.12) <= 0.02,
             "alpha(8,5) = " + fmt(a85) + " outside 0.12 +/- 0.02");
    std::cout << "criterion 1 (alpha calibration 0.37/0.12): " << (c.ok ? "PASS" : "FAIL")
              << " [alpha(5,2)=" << fmt(a52) << ", alpha(8,5)=" << fmt(a85) << "]"
              << (c.ok ? "" : " -- " + c.detail.str()) << '\n';
    return c.ok;
}

// Criterion 2: KSG saturation vs LNC recovery on the 2-D linear regime.
bool criterion2() {
    Checker c;
    const double sigma = 1e-4;
    const double truth = linear_true_mi(sigma);
    EstimatorConfig cfg;
    cfg.k = 5;
    cfg.alpha = 0.37;
    cfg.threads = kThreads;

    const double ksg_mean = mean_over_seeds(10, 1000, [&](std::uint64_t s) {
        return mi_ksg(make(Family::linear, sigma, 5000, s), cfg).value;
    });
    const double lnc_mean = mean_over_seeds(10, 1000, [&](std::uint64_t s) {
        return mi_lnc(make(Family::linear, sigma, 5000, s), cfg).value;
    });

    const double bound = ksg_estimate_upper_bound(5000, 5, 2);
    c.expect(ksg_mean <= bound, "KSG mean " + fmt(ksg_mean) + " above bound " + fmt(bound));
    c.expect(ksg_mean <= truth - 0.5,
             "KSG mean " + fmt(ksg_mean) + " not saturated below truth-0.5");
    c.expect(std::abs(lnc_mean - truth) <= 0.3,
             "LNC mean " + fmt(lnc_mean) + " not within 0.3 of " + fmt(truth));
    std::cout << "criterion 2 (KSG saturation vs LNC recovery): " << (c.ok ? "PASS" : "FAIL")
              << " [truth=" << fmt(truth) << ", KSG=" << fmt(ksg_mean)
              << ", LNC=" << fmt(lnc_mean) << ", bound=" << fmt(bound) << "]"
              << (c.ok ? "" : " -- " + c.detail.str()) << '\n';
    return c.ok;
}

// Criterion 3: empirical sample complexity respects the Theorem-3 bound.
bool criterion3() {
    Checker c;
    ComplexityOptions opts;
    opts.eps = 0.1;
    opts.k = 1;
    opts.trials = 10;
    opts.n_cap = 1 << 18;
    opts.seed = 7;
    opts.threads = kThreads;
    const std::vector<double> targets{0.7, 1.4, 2.1, 2.8, 3.5, 4.2};
    const auto records = sample_complexity(targets, opts);

    std::ostringstream ns_list;
    double prev_log = -1.0;
    for (const auto& r : records) {
        ns_list << ' ' << r.n_s << (r.censored ? "(censored)" : "");
        if (r.censored) continue;
        const double bound = std::exp(r.i_true - 0.1) + 1.0;
        c.expect(static_cast<double>(r.n_s) >= bound,
                 "N_s " + std::to_string(r.n_s) + " below bound " + fmt(bound) + " at I=" +
                     fmt(r.i_true));
        const double log_ns = std::log(static_cast<double>(r.n_s));
        c.expect(log_ns > prev_log, "log N_s not increasing at I=" + fmt(r.i_true));
        prev_log = log_ns;
    }
    std::cout << "criterion 3 (Theorem-3 bound consistency): " << (c.ok ? "PASS" : "FAIL")
              << " [N_s:" << ns_list.str() << "]" << (c.ok ? "" : " -- " + c.detail.str())
              << '\n';
    return c.ok;
}

// Criterion 4: closed-form calibration of the estimators.
bool criterion4() {
    Checker c;
    EstimatorConfig cfg;
    cfg.k = 5;
    cfg.threads = kThreads;
    cfg.alpha = 0.37;

    const double h_sq = mean_over_seeds(20, 2000, [&](std::uint64_t s) {
        return entropy_ksg(make(Family::independent_uniform, 0.0, 10000, s), 5, kThreads);
    });
    c.expect(std::abs(h_sq) <= 0.03, "KSG entropy on U(0,1)^2 = " + fmt(h_sq));

    const double gauss = mean_over_seeds(20, 2100, [&](std::uint64_t s) {
        return mi_knn_naive(make(Family::gaussian_rho, 0.0, 10000, s, 0.6), 5, kThreads).value;
    });
    c.expect(std::abs(gauss - 0.2231435513) <= 0.05, "naive kNN MI on rho=0.6 = " + fmt(gauss));

    const char* names[3] = {"knn", "ksg", "lnc"};
    double means[3] = {0.0, 0.0, 0.0};
    for (int e = 0; e < 3; ++e) {
        means[e] = mean_over_seeds(20, 2200, [&](std::uint64_t s) {
            return run_estimator(names[e], make(Family::independent_uniform, 0.0, 10000, s), cfg)
                .value;
        });
        c.expect(std::abs(means[e]) <= 0.05,
                 std::string(names[e]) + " on independent uniforms = " + fmt(means[e]));
    }
    std::cout << "criterion 4 (closed-form calibration): " << (c.ok ? "PASS" : "FAIL")
              << " [H=" << fmt(h_sq) << ", gauss=" << fmt(gauss) << ", indep knn/ksg/lnc="
              << fmt(means[0]) << "/" << fmt(means[1]) << "/" << fmt(means[2]) << "]"
              << (c.ok ? "" : " -- " + c.detail.str()) << '\n';
    return c.ok;
}

// Criterion 5: 5-D convergence direction at the reduced desk scale.
bool criterion5() {
    Checker c;
    const double sigma = 0.01;
    RelationshipSpec spec;
    spec.family = Family::linear_5d;
    spec.noise_sigma = sigma;
    const double truth = true_mi(spec).value;

    EstimatorConfig cfg;
    cfg.k = 8;
    cfg.alpha = 0.12;
    cfg.threads = kThreads;

    const double lnc100 = mean_over_seeds(10, 3000, [&](std::uint64_t s) {
        return mi_lnc(make(Family::linear_5d, sigma, 100, s), cfg).value;
    });
    const double ksg10k = mean_over_seeds(10, 3100, [&](std::uint64_t s) {
        return mi_ksg(make(Family::linear_5d, sigma, 10000, s), cfg).value;
    });

    c.expect(std::abs(lnc100 - truth) <= 0.15 * truth,
             "LNC at n=100 = " + fmt(lnc100) + " not within 15% of " + fmt(truth));
    c.expect(ksg10k < 0.5 * truth,
             "KSG at n=1e4 = " + fmt(ksg10k) + " not below 50% of " + fmt(truth));
    std::cout << "criterion 5 (5-D convergence direction): " << (c.ok ? "PASS" : "FAIL")
              << " [truth=" << fmt(truth) << ", LNC(100)=" << fmt(lnc100)
              << ", KSG(1e4)=" << fmt(ksg10k) << "]" << (c.ok ? "" : " -- " + c.detail.str())
              << '\n';
    return c.ok;
}

// Criterion 6: always-on property suites.
bool criterion6() {
    Checker c;
    std::mt19937_64 gen(424242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // LNC >= KSG dominance on 200 random configurations.
    for (int rep = 0; rep < 200; ++rep) {
        const Family family = rep % 3 == 0   ? Family::quadratic
                              : rep % 3 == 1 ? Family::linear
                                             : Family::independent_uniform;
        const double sigma = std::pow(10.0, -0.5 - 3.5 * unit(gen));
        const std::size_t n = 40 + gen() % 260;
        EstimatorConfig cfg;
        cfg.k = 1 + gen() % 8;
        cfg.alpha = 0.05 + 0.9 * unit(gen);
        const Dataset data = make(family, sigma, n, gen());
        const double lnc = mi_lnc(data, cfg).value;
        const double ksg = mi_ksg(data, cfg).value;
        if (!(lnc >= ksg - 1e-12)) {
            c.expect(false, "dominance violated at rep " + std::to_string(rep));
            break;
        }
    }

    // KSG <= (d-1)(log(N-1) + (k-1)/k) on 200 random datasets.
    for (int rep = 0; rep < 200; ++rep) {
        const Family family = rep % 2 ? Family::linear : Family::sine_high_freq;
        const double sigma = std::pow(10.0, -0.5 - 4.0 * unit(gen));
        const std::size_t n = 30 + gen() % 400;
        EstimatorConfig cfg;
        cfg.k = 1 + gen() % 6;
        const Dataset data = make(family, sigma, n, gen());
        const double v = mi_ksg(data, cfg).value;
        if (!(v <= ksg_estimate_upper_bound(n, cfg.k, 2) + 1e-12)) {
            c.expect(false, "estimate bound violated at rep " + std::to_string(rep));
            break;
        }
    }

    // Index equals brute force on 100 random instances, both metrics.
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 30 + gen() % 1970;
        const std::size_t d = 1 + gen() % 4;
        std::vector<double> vals(n * d);
        for (double& v : vals) v = unit(gen);
        std::vector<std::string> names(d);
        for (std::size_t j = 0; j < d; ++j) names[j] = "c" + std::to_string(j);
        const Dataset data(vals, names);
        const std::size_t k = 1 + gen() % 6;
        const std::size_t i = gen() % n;
        for (Metric metric : {Metric::max_norm, Metric::euclidean}) {
            const SpatialIndex index(data, metric);
            const auto got = index.nearest(i, k);
            std::vector<std::pair<double, std::size_t>> all;
            for (std::size_t l = 0; l < n; ++l) {
                if (l == i) continue;
                double dist = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = data.at(l, j) - data.at(i, j);
                    dist = metric == Metric::max_norm ? std::max(dist, std::abs(diff))
                                                      : dist + diff * diff;
                }
                all.emplace_back(dist, l);
            }
            std::sort(all.begin(), all.end());
            for (std::size_t t = 0; t < k; ++t) {
                if (got[t].second != all[t].second) {
                    c.expect(false, "knn mismatch at rep " + std::to_string(rep));
                    break;
                }
            }
        }
    }

    // Ratio-form substitution identity to 1e-12.
    {
        RatioFormTerms t;
        t.n = 128;
        t.d = 2;
        std::uniform_real_distribution<double> mass(0.05, 3.0);
        t.joint_mass.resize(t.n);
        t.joint_volume.resize(t.n);
        t.corrected_volume.resize(t.n);
        t.marginal_mass.resize(t.n * t.d);
        t.marginal_volume.resize(t.n * t.d);
        for (std::size_t i = 0; i < t.n; ++i) {
            t.joint_mass[i] = mass(gen);
            t.joint_volume[i] = mass(gen);
            t.corrected_volume[i] = mass(gen);
            for (std::size_t j = 0; j < t.d; ++j) {
                t.marginal_mass[i * t.d + j] = mass(gen);
                t.marginal_volume[i * t.d + j] = mass(gen);
            }
        }
        RatioFormTerms uncorrected = t;
        uncorrected.corrected_volume = uncorrected.joint_volume;
        std::vector<double> log_ratio(t.n);
        for (std::size_t i = 0; i < t.n; ++i) {
            log_ratio[i] = std::log(t.corrected_volume[i] / t.joint_volume[i]);
        }
        const double lhs = mi_generic_ratio(t);
        const double rhs = mi_generic_ratio(uncorrected) -
                           deterministic_sum(log_ratio) / static_cast<double>(t.n);
        c.expect(std::abs(lhs - rhs) <= 1e-12, "ratio-form identity broke");
    }

    // PCA rotation invariance to 1e-9 relative.
    {
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        int tested = 0;
        for (int rep = 0; rep < 60 && tested < 20; ++rep) {
            const std::size_t d = 3, k = 7;
            std::vector<double> off(k * d);
            for (double& v : off) v = coord(gen);
            std::vector<double> m(d * d, 0.0);
            for (std::size_t l = 0; l < k; ++l) {
                for (std::size_t r = 0; r < d; ++r) {
                    for (std::size_t cc = 0; cc < d; ++cc) {
                        m[r * d + cc] += off[l * d + r] * off[l * d + cc] / k;
                    }
                }
            }
            const SymmetricEigenResult eig = eigh(m, d);
            bool degen = false;
            for (std::size_t q = 1; q < d; ++q) {
                if (eig.eigenvalues[q - 1] - eig.eigenvalues[q] < 1e-9) degen = true;
            }
            if (degen) continue;
            const auto [v0, def0] = pca_rect_volume_from_offsets(off, k, d);
            if (def0) continue;

            std::vector<double> q(d * d, 0.0);
            for (std::size_t i = 0; i < d; ++i) q[i * d + i] = 1.0;
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = a + 1; b < d; ++b) {
                    const double t = angle(gen);
                    const double cs = std::cos(t), sn = std::sin(t);
                    for (std::size_t i = 0; i < d; ++i) {
                        const double qa = q[i * d + a], qb = q[i * d + b];
                        q[i * d + a] = cs * qa - sn * qb;
                        q[i * d + b] = sn * qa + cs * qb;
                    }
                }
            }
            std::vector<double> rotated(k * d, 0.0);
            for (std::size_t l = 0; l < k; ++l) {
                for (std::size_t r = 0; r < d; ++r) {
                    for (std::size_t cc = 0; cc < d; ++cc) {
                        rotated[l * d + r] += q[r * d + cc] * off[l * d + cc];
                    }
                }
            }
            const auto [v1, def1] = pca_rect_volume_from_offsets(rotated, k, d);
            if (!(std::abs(v1 - v0) <= 1e-9 * std::max(v0, 1e-30)) || def1) {
                c.expect(false, "rotation invariance broke at rep " + std::to_string(rep));
            }
            ++tested;
        }
        c.expect(tested >= 20, "too few non-degenerate rotation instances");
    }

    // Permutation and translation invariance, exact.
    {
        const Dataset data = make(Family::linear, 1e-2, 500, 99);
        std::vector<std::size_t> perm(data.n());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> shuffled(data.n() * data.d());
        for (std::size_t i = 0; i < data.n(); ++i) {
            for (std::size_t j = 0; j < data.d(); ++j) {
                shuffled[i * data.d() + j] = data.at(perm[i], j);
            }
        }
        const Dataset permuted(shuffled, data.column_names());
        EstimatorConfig cfg;
        cfg.k = 5;
        cfg.alpha = 0.37;
        c.expect(mi_ksg(permuted, cfg).value == mi_ksg(data, cfg).value,
                 "permutation changed KSG");
        c.expect(mi_lnc(permuted, cfg).value == mi_lnc(data, cfg).value,
                 "permutation changed LNC");

        std::vector<double> grid(800 * 2);
        for (double& v : grid) v = static_cast<double>(gen() % (1u << 26)) * 0x1.0p-26;
        const Dataset gdata(grid, {"x", "y"});
        std::vector<double> moved = grid;
        for (double& v : moved) v += 1.0;
        const Dataset gmoved(moved, {"x", "y"});
        c.expect(mi_ksg(gmoved, cfg).value == mi_ksg(gdata, cfg).value,
                 "translation changed KSG");
        c.expect(mi_lnc(gmoved, cfg).value == mi_lnc(gdata, cfg).value,
                 "translation changed LNC");
    }

    // Determinism under 1 vs 8 worker threads.
    {
        const Dataset data = make(Family::linear, 1e-3, 2000, 5);
        EstimatorConfig one;
        one.k = 5;
        one.alpha = 0.37;
        EstimatorConfig eight = one;
        eight.threads = 8;
        c.expect(mi_ksg(data, one).value == mi_ksg(data, eight).value, "KSG thread-dependent");
        c.expect(mi_lnc(data, one).value == mi_lnc(data, eight).value, "LNC thread-dependent");
        c.expect(estimate_alpha(5, 2, 50000, 5e-3, 3, 1) ==
                     estimate_alpha(5, 2, 50000, 5e-3, 3, 8),
                 "calibration thread-dependent");
    }

    std::cout << "criterion 6 (property suites): " << (c.ok ? "PASS" : "FAIL")
              << (c.ok ? "" : " -- " + c.detail.str()) << '\n';
    return c.ok;
}

// Criterion 7: rank stability and synergy on planted data.
bool criterion7() {
    Checker c;

    // Planted ladder, 10 pairs at n = 1200.
    const MaskedDataset ladder = planted_ladder(1200, 10, 99);
    RankStabilityOptions opts;
    opts.top_m = 10;
    opts.repeats = 50;
    opts.min_rows = 150;
    opts.seed = 4242;

    EstimatorConfig cfg;
    cfg.k = 5;
    cfg.alpha = 0.37;
    cfg.threads = kThreads;

    opts.fractions = {1.0};
    const auto at_full_ksg = rank_stability(ladder, "ksg", cfg, opts);
    const auto at_full_lnc = rank_stability(ladder, "lnc", cfg, opts);
    c.expect(at_full_ksg[0].spearman_mean == 1.0, "KSG Spearman at rho=1 not exactly 1");
    c.expect(at_full_lnc[0].spearman_mean == 1.0, "LNC Spearman at rho=1 not exactly 1");

    opts.fractions = {0.5};
    const auto half_ksg = rank_stability(ladder, "ksg", cfg, opts);
    const auto half_lnc = rank_stability(ladder, "lnc", cfg, opts);
    c.expect(half_lnc[0].spearman_mean >= half_ksg[0].spearman_mean,
             "LNC mean Spearman " + fmt(half_lnc[0].spearman_mean) + " below KSG " +
                 fmt(half_ksg[0].spearman_mean) + " at rho=0.5");

    // Planted synergistic triple at n = 2000.
    const double alpha3 = estimate_alpha(5, 3, 100000, 5e-3, 20200817, kThreads);
    double ss_lnc = 0.0, ss_ksg = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Dataset triple = planted_synergy_triple(2000, 1e-3, 600 + s);
        const Dataset xy = triple.select_columns({0, 1});
        const Dataset yz = triple.select_columns({1, 2});
        const Dataset xz = triple.select_columns({0, 2});
        EstimatorConfig cfg3 = cfg;
        cfg3.alpha = alpha3;
        bool inf_flag = false;
        const double lnc_multi = mi_lnc(triple, cfg3).value;
        const double lnc_pair = std::max({mi_lnc(xy, cfg).value, mi_lnc(yz, cfg).value,
                                          mi_lnc(xz, cfg).value});
        ss_lnc += synergy_score(lnc_multi, lnc_pair, inf_flag) / 5.0;
        const double ksg_multi = mi_ksg(triple, cfg3).value;
        const double ksg_pair = std::max({mi_ksg(xy, cfg).value, mi_ksg(yz, cfg).value,
                                          mi_ksg(xz, cfg).value});
        ss_ksg += synergy_score(ksg_multi, ksg_pair, inf_flag) / 5.0;
    }
    c.expect(ss_lnc > ss_ksg, "LNC synergy score " + fmt(ss_lnc) + " not above KSG " +
                                  fmt(ss_ksg));

    std::cout << "criterion 7 (rank stability and synergy): " << (c.ok ? "PASS" : "FAIL")
              << " [Spearman rho=0.5 LNC=" << fmt(half_lnc[0].spearman_mean)
              << " KSG=" << fmt(half_ksg[0].spearman_mean) << "; SS LNC=" << fmt(ss_lnc)
              << " KSG=" << fmt(ss_ksg) << "]" << (c.ok ? "" : " -- " + c.detail.str()) << '\n';
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    const std::vector<std::function<bool()>> criteria{
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7};

    bool ok = true;
    if (which == "all") {
        for (const auto& crit : criteria) ok = crit() && ok;
    } else {
        const int idx = std::stoi(which);
        if (idx < 1 || idx > static_cast<int>(criteria.size())) {
            std::cerr << "usage: acceptance [1-7|all]\n";
            return 2;
        }
        ok = criteria[idx - 1]();
    }
    return ok ? 0 : 1;
}
