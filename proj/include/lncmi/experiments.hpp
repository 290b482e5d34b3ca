#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lncmi/dataset.hpp"
#include "lncmi/estimators.hpp"
#include "lncmi/synthgen.hpp"

namespace lncmi {

// Estimator selector shared by experiments and the CLI: knn | ksg | lnc.
MIEstimate run_estimator(const std::string& name, const Dataset& data,
                         const EstimatorConfig& cfg);

struct SweepRecord {
    std::string experiment;
    std::string estimator;
    std::string family;
    double sigma = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    std::optional<double> alpha;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    std::optional<double> truth;
    std::optional<double> abs_error;
};

struct ComplexityRecord {
    double i_true = 0.0;
    double eps = 0.0;
    std::size_t k = 0;
    std::size_t d = 0;
    std::size_t n_s = 0;           // minimal N with mean abs error <= eps
    double n_bound = 0.0;          // theoretical lower bound for the same query
    std::size_t trials = 0;        // seeds per probed N
    bool censored = false;         // search hit n_cap without success
};

struct RankStabilityRecord {
    std::string estimator;
    double rho = 0.0;
    double spearman_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t repeats = 0;
};

struct TripletRecord {
    std::string estimator;
    std::string x, y, z;
    double multi_info = 0.0;
    double max_pair_mi = 0.0;
    double ss = 0.0;
    bool ss_infinite = false;  // max pairwise MI <= 0, SS reported as +inf sentinel
    double interaction_info = 0.0;
};

// SS = multi / max_pair; sets the infinite flag instead of dividing by a
// nonpositive denominator.
double synergy_score(double multi_info, double max_pair_mi, bool& infinite);

// One record per (family, sigma, seed, estimator): generate at size n,
// estimate, attach truth when the oracle covers the family. Output sorted by
// (family, sigma, n, seed, estimator).
std::vector<SweepRecord> noise_sweep(const std::vector<Family>& families,
                                     const std::vector<double>& sigmas, std::size_t n,
                                     const std::vector<std::string>& estimators,
                                     const std::vector<std::uint64_t>& seeds,
                                     const EstimatorConfig& cfg);

// KSG and LNC across a sample-size grid at fixed noise; sorted by n.
std::vector<SweepRecord> convergence_run(Family family, double sigma,
                                         const std::vector<std::size_t>& n_grid,
                                         const std::vector<std::uint64_t>& seeds,
                                         const EstimatorConfig& cfg);

struct ComplexityOptions {
    double eps = 0.1;
    std::size_t k = 1;
    std::size_t trials = 10;     // seeds per probed N
    std::size_t n_cap = 1 << 18;
    std::size_t n_floor = 8;
    std::uint64_t seed = 7;
    int threads = 1;
};

// For each target MI (realized through the linear family's sigma), doubling
// search then bisection for the minimal N at which the KSG estimator's mean
// absolute error over `trials` seeds is at most eps. Censors at n_cap.
std::vector<ComplexityRecord> sample_complexity(const std::vector<double>& i_targets,
                                                const ComplexityOptions& opts);

struct RankStabilityOptions {
    std::size_t top_m = 150;
    std::vector<double> fractions{0.5};
    std::size_t repeats = 200;
    std::size_t min_rows = 150;
    std::uint64_t seed = 11;
};

// Rank qualifying column pairs by MI, keep the top_m set, then re-rank on row
// subsamples of each fraction and report the Spearman correlation against the
// full-data ranking (mean and 95% interval over repeats).
std::vector<RankStabilityRecord> rank_stability(const MaskedDataset& data,
                                                const std::string& estimator,
                                                const EstimatorConfig& cfg,
                                                const RankStabilityOptions& opts);

struct SynergyOptions {
    double pair_threshold = 0.5;  // consider triplets whose max pairwise MI is below this
    double ss_threshold = 5.0;
    std::size_t min_rows = 150;
};

// Pairwise MI matrix, then per-triplet multi-information over jointly complete
// rows; emits triplets with SS >= ss_threshold sorted by SS descending
// (infinite sentinels first).
std::vector<TripletRecord> synergy_scan(const MaskedDataset& data, const std::string& estimator,
                                        const EstimatorConfig& cfg, const SynergyOptions& opts);

// Synthetic stand-ins for the withheld survey data: independent pairs
// Y_m = X_m + sigma_m * noise with sigma_m laddered over several decades, and
// the synergistic triple Z = (X + Y) mod 1 + sigma * noise.
MaskedDataset planted_ladder(std::size_t n, std::size_t n_pairs, std::uint64_t seed);
Dataset planted_synergy_triple(std::size_t n, double sigma, std::uint64_t seed);

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out);
void write_csv(const std::vector<ComplexityRecord>& records, std::ostream& out);
void write_csv(const std::vector<RankStabilityRecord>& records, std::ostream& out);
void write_csv(const std::vector<TripletRecord>& records, std::ostream& out);

}  // namespace lncmi
