#include "lncmi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include "lncmi/bounds.hpp"
#include "lncmi/errors.hpp"
#include "lncmi/rng.hpp"

namespace lncmi {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(splitmix64(a) ^ b); }

}  // namespace

MIEstimate run_estimator(const std::string& name, const Dataset& data,
                         const EstimatorConfig& cfg) {
    if (name == "knn") return mi_knn_naive(data, cfg.k, cfg.threads);
    if (name == "ksg") return mi_ksg(data, cfg);
    if (name == "lnc") return mi_lnc(data, cfg);
    throw error("unknown estimator '" + name + "' (expected knn, ksg, or lnc)");
}

double synergy_score(double multi_info, double max_pair_mi, bool& infinite) {
    if (max_pair_mi <= 0.0) {
        infinite = true;
        return std::numeric_limits<double>::infinity();
    }
    infinite = false;
    return multi_info / max_pair_mi;
}

namespace {

std::optional<double> truth_for(Family family, double sigma) {
    RelationshipSpec spec;
    spec.family = family;
    spec.noise_sigma = sigma;
    if (family == Family::gaussian_rho) spec.rho = sigma;
    try {
        return true_mi(spec).value;
    } catch (const truth_unavailable&) {
        return std::nullopt;
    }
}

SweepRecord make_record(const std::string& experiment, const std::string& estimator,
                        Family family, double sigma, std::size_t n, std::uint64_t seed,
                        const EstimatorConfig& cfg, const std::optional<double>& truth) {
    RelationshipSpec spec;
    spec.family = family;
    spec.noise_sigma = family == Family::gaussian_rho ? 0.0 : sigma;
    if (family == Family::gaussian_rho) spec.rho = sigma;
    spec.n = n;
    spec.seed = seed;
    const Dataset data = generate(spec);

    SweepRecord rec;
    rec.experiment = experiment;
    rec.estimator = estimator;
    rec.family = family_name(family);
    rec.sigma = sigma;
    rec.n = n;
    rec.k = cfg.k;
    if (estimator == "lnc") {
        rec.alpha = cfg.alpha ? *cfg.alpha : cfg.alpha_table->lookup(cfg.k, data.d());
    }
    rec.seed = seed;
    rec.estimate = run_estimator(estimator, data, cfg).value;
    rec.truth = truth;
    if (truth) rec.abs_error = std::abs(rec.estimate - *truth);
    return rec;
}

void canonical_sort(std::vector<SweepRecord>& records) {
    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::tie(a.family, a.sigma, a.n, a.seed, a.estimator) <
               std::tie(b.family, b.sigma, b.n, b.seed, b.estimator);
    });
}

}  // namespace

std::vector<SweepRecord> noise_sweep(const std::vector<Family>& families,
                                     const std::vector<double>& sigmas, std::size_t n,
                                     const std::vector<std::string>& estimators,
                                     const std::vector<std::uint64_t>& seeds,
                                     const EstimatorConfig& cfg) {
    std::vector<SweepRecord> records;
    records.reserve(families.size() * sigmas.size() * seeds.size() * estimators.size());
    for (Family family : families) {
        for (double sigma : sigmas) {
            const std::optional<double> truth = truth_for(family, sigma);
            for (std::uint64_t seed : seeds) {
                for (const std::string& est : estimators) {
                    records.push_back(
                        make_record("sweep", est, family, sigma, n, seed, cfg, truth));
                }
            }
        }
    }
    canonical_sort(records);
    return records;
}

std::vector<SweepRecord> convergence_run(Family family, double sigma,
                                         const std::vector<std::size_t>& n_grid,
                                         const std::vector<std::uint64_t>& seeds,
                                         const EstimatorConfig& cfg) {
    for (std::size_t n : n_grid) {
        if (n < cfg.k + 1) {
            throw error("convergence_run: grid size " + std::to_string(n) +
                        " is below k+1 = " + std::to_string(cfg.k + 1));
        }
    }
    const std::optional<double> truth = truth_for(family, sigma);
    std::vector<SweepRecord> records;
    records.reserve(2 * n_grid.size() * seeds.size());
    for (std::size_t n : n_grid) {
        for (std::uint64_t seed : seeds) {
            for (const char* est : {"ksg", "lnc"}) {
                records.push_back(make_record("converge", est, family, sigma, n, seed, cfg, truth));
            }
        }
    }
    canonical_sort(records);
    return records;
}

std::vector<ComplexityRecord> sample_complexity(const std::vector<double>& i_targets,
                                                const ComplexityOptions& opts) {
    if (opts.eps <= 0.0) throw error("sample_complexity: eps must be > 0");
    if (opts.trials < 1) throw error("sample_complexity: trials must be >= 1");

    std::vector<ComplexityRecord> records;
    records.reserve(i_targets.size());
    for (std::size_t ti = 0; ti < i_targets.size(); ++ti) {
        const double target = i_targets[ti];
        const double sigma = sigma_for_linear_mi(target);
        const double truth = linear_true_mi(sigma);

        EstimatorConfig cfg;
        cfg.k = opts.k;
        cfg.threads = opts.threads;

        const auto succeeds = [&](std::size_t n) {
            double err_sum = 0.0;
            for (std::size_t t = 0; t < opts.trials; ++t) {
                RelationshipSpec spec;
                spec.family = Family::linear;
                spec.noise_sigma = sigma;
                spec.n = n;
                spec.seed = mix(mix(opts.seed, ti), mix(n, t));
                err_sum += std::abs(mi_ksg(generate(spec), cfg).value - truth);
            }
            return err_sum / static_cast<double>(opts.trials) <= opts.eps;
        };

        ComplexityRecord rec;
        rec.i_true = truth;
        rec.eps = opts.eps;
        rec.k = opts.k;
        rec.d = 2;
        rec.trials = opts.trials;
        rec.n_bound = ksg_sample_lower_bound({truth, opts.eps, 2, opts.k});

        const std::size_t floor_n = std::max(opts.n_floor, opts.k + 2);
        if (succeeds(floor_n)) {
            rec.n_s = floor_n;
        } else {
            std::size_t lo = floor_n;           // known failure
            std::size_t hi = 2 * floor_n;
            while (hi <= opts.n_cap && !succeeds(hi)) {
                lo = hi;
                hi *= 2;
            }
            if (hi > opts.n_cap) {
                rec.n_s = opts.n_cap;
                rec.censored = true;
            } else {
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    if (succeeds(mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                rec.n_s = hi;
            }
        }
        records.push_back(rec);
    }
    return records;
}

namespace {

// Subsample `count` of the view's rows without replacement, original order
// preserved (count == rows.size() returns the view unchanged).
ColumnPairView subsample_view(const ColumnPairView& view, std::size_t count, Rng& rng) {
    if (count >= view.rows.size()) return view;
    std::vector<std::size_t> pool = view.rows;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    ColumnPairView out;
    out.columns = view.columns;
    out.rows = std::move(pool);
    return out;
}

}  // namespace

std::vector<RankStabilityRecord> rank_stability(const MaskedDataset& data,
                                                const std::string& estimator,
                                                const EstimatorConfig& cfg,
                                                const RankStabilityOptions& opts) {
    // Qualifying pairs and their full-data estimates.
    std::vector<ColumnPairView> views;
    std::vector<double> full_mi;
    for (std::size_t a = 0; a < data.d(); ++a) {
        for (std::size_t b = a + 1; b < data.d(); ++b) {
            try {
                views.push_back(data.select_complete({a, b}, opts.min_rows));
            } catch (const insufficient_samples&) {
                continue;
            }
            full_mi.push_back(run_estimator(estimator, data.materialize(views.back()), cfg).value);
        }
    }
    if (views.empty()) throw error("rank_stability: no column pair has enough complete rows");

    // Top set by full-data MI.
    std::vector<std::size_t> order(views.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return full_mi[x] > full_mi[y]; });
    const std::size_t m = std::min(opts.top_m, order.size());
    order.resize(m);

    std::vector<double> base(m);
    for (std::size_t i = 0; i < m; ++i) base[i] = full_mi[order[i]];

    std::vector<RankStabilityRecord> records;
    for (std::size_t fi = 0; fi < opts.fractions.size(); ++fi) {
        const double rho = opts.fractions[fi];
        if (rho <= 0.0 || rho > 1.0) throw error("rank_stability: fractions must be in (0, 1]");
        std::vector<double> coeffs(opts.repeats);
        for (std::size_t rep = 0; rep < opts.repeats; ++rep) {
            std::vector<double> sub(m);
            for (std::size_t i = 0; i < m; ++i) {
                const ColumnPairView& view = views[order[i]];
                const std::size_t count = std::max<std::size_t>(
                    cfg.k + 2, static_cast<std::size_t>(
                                   std::floor(rho * static_cast<double>(view.rows.size()))));
                Rng rng(mix(mix(opts.seed, fi), mix(rep, i)));
                const ColumnPairView picked = subsample_view(view, count, rng);
                sub[i] = run_estimator(estimator, data.materialize(picked), cfg).value;
            }
            coeffs[rep] = spearman(base, sub);
        }
        RankStabilityRecord rec;
        rec.estimator = estimator;
        rec.rho = rho;
        rec.repeats = opts.repeats;
        double mean = 0.0;
        for (double c : coeffs) mean += c;
        mean /= static_cast<double>(coeffs.size());
        double var = 0.0;
        for (double c : coeffs) var += (c - mean) * (c - mean);
        var = coeffs.size() > 1 ? var / static_cast<double>(coeffs.size() - 1) : 0.0;
        const double half = 1.96 * std::sqrt(var / static_cast<double>(coeffs.size()));
        rec.spearman_mean = mean;
        rec.ci_low = mean - half;
        rec.ci_high = mean + half;
        records.push_back(rec);
    }
    return records;
}

std::vector<TripletRecord> synergy_scan(const MaskedDataset& data, const std::string& estimator,
                                        const EstimatorConfig& cfg, const SynergyOptions& opts) {
    const std::size_t d = data.d();
    if (d < 3) throw error("synergy_scan: need at least 3 columns");

    // Pairwise MI on pairwise-complete rows; pairs without enough rows are
    // excluded from all triplets.
    std::map<std::pair<std::size_t, std::size_t>, double> pair_mi;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            try {
                const ColumnPairView view = data.select_complete({a, b}, opts.min_rows);
                pair_mi[{a, b}] = run_estimator(estimator, data.materialize(view), cfg).value;
            } catch (const insufficient_samples&) {
                continue;
            }
        }
    }

    std::vector<TripletRecord> records;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            if (!pair_mi.count({a, b})) continue;
            for (std::size_t c = b + 1; c < d; ++c) {
                if (!pair_mi.count({a, c}) || !pair_mi.count({b, c})) continue;
                ColumnPairView view;
                try {
                    view = data.select_complete({a, b, c}, opts.min_rows);
                } catch (const insufficient_samples&) {
                    continue;
                }
                const double max_pair = std::max(
                    {pair_mi[{a, b}], pair_mi[{a, c}], pair_mi[{b, c}]});
                if (max_pair > opts.pair_threshold) continue;

                TripletRecord rec;
                rec.estimator = estimator;
                rec.x = data.column_names()[a];
                rec.y = data.column_names()[b];
                rec.z = data.column_names()[c];
                rec.multi_info = run_estimator(estimator, data.materialize(view), cfg).value;
                rec.max_pair_mi = max_pair;
                rec.ss = synergy_score(rec.multi_info, max_pair, rec.ss_infinite);
                rec.interaction_info =
                    pair_mi[{a, b}] + pair_mi[{a, c}] + pair_mi[{b, c}] - rec.multi_info;
                if (rec.ss_infinite || rec.ss >= opts.ss_threshold) records.push_back(rec);
            }
        }
    }
    std::sort(records.begin(), records.end(), [](const TripletRecord& a, const TripletRecord& b) {
        if (a.ss_infinite != b.ss_infinite) return a.ss_infinite;
        return a.ss > b.ss;
    });
    return records;
}

MaskedDataset planted_ladder(std::size_t n, std::size_t n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw error("planted_ladder: need at least one pair");
    const std::size_t d = 2 * n_pairs;
    Rng rng(seed);
    std::vector<double> values(n * d);
    std::vector<std::uint8_t> present(n * d, 1);
    std::vector<std::string> names(d);
    for (std::size_t m = 0; m < n_pairs; ++m) {
        names[2 * m] = "x" + std::to_string(m);
        names[2 * m + 1] = "y" + std::to_string(m);
        // Noise widths laddered from 10^-0.5 down to 10^-5.
        const double expo =
            n_pairs > 1 ? 0.5 + 4.5 * static_cast<double>(m) / static_cast<double>(n_pairs - 1)
                        : 0.5;
        const double sigma = std::pow(10.0, -expo);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.uniform01();
            values[i * d + 2 * m] = x;
            values[i * d + 2 * m + 1] = x + sigma * (rng.uniform01() - 0.5);
        }
    }
    return MaskedDataset(std::move(values), std::move(present), std::move(names));
}

Dataset planted_synergy_triple(std::size_t n, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        values[3 * i] = x;
        values[3 * i + 1] = y;
        values[3 * i + 2] = std::fmod(x + y, 1.0) + sigma * (rng.uniform01() - 0.5);
    }
    return Dataset(std::move(values), {"x", "y", "z"});
}

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
    out << "experiment,estimator,family,sigma,n,k,alpha,seed,estimate,truth,abs_error\n";
    for (const auto& r : records) {
        out << r.experiment << ',' << r.estimator << ',' << r.family << ',' << fmt(r.sigma) << ','
            << r.n << ',' << r.k << ',' << fmt_opt(r.alpha) << ',' << r.seed << ','
            << fmt(r.estimate) << ',' << fmt_opt(r.truth) << ',' << fmt_opt(r.abs_error) << '\n';
    }
}

void write_csv(const std::vector<ComplexityRecord>& records, std::ostream& out) {
    out << "experiment,i_true,eps,k,d,n_s,n_bound,trials,censored\n";
    for (const auto& r : records) {
        out << "complexity," << fmt(r.i_true) << ',' << fmt(r.eps) << ',' << r.k << ',' << r.d
            << ',' << r.n_s << ',' << fmt(r.n_bound) << ',' << r.trials << ','
            << (r.censored ? 1 : 0) << '\n';
    }
}

void write_csv(const std::vector<RankStabilityRecord>& records, std::ostream& out) {
    out << "experiment,estimator,rho,spearman_mean,ci_low,ci_high,repeats\n";
    for (const auto& r : records) {
        out << "rank," << r.estimator << ',' << fmt(r.rho) << ',' << fmt(r.spearman_mean) << ','
            << fmt(r.ci_low) << ',' << fmt(r.ci_high) << ',' << r.repeats << '\n';
    }
}

void write_csv(const std::vector<TripletRecord>& records, std::ostream& out) {
    out << "experiment,estimator,x,y,z,multi_info,max_pair_mi,ss,ss_infinite,interaction_info\n";
    for (const auto& r : records) {
        out << "synergy," << r.estimator << ',' << r.x << ',' << r.y << ',' << r.z << ','
            << fmt(r.multi_info) << ',' << fmt(r.max_pair_mi) << ','
            << (r.ss_infinite ? "inf" : fmt(r.ss)) << ',' << (r.ss_infinite ? 1 : 0) << ','
            << fmt(r.interaction_info) << '\n';
    }
}

}  // namespace lncmi
