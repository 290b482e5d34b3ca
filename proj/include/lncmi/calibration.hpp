#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "lncmi/rng.hpp"

namespace lncmi {

// Which volume the trial ratio is measured against.
//   empirical:  the axis-aligned rectangle of the drawn points themselves,
//               mirroring the runtime statistic v_pca / v_axis exactly.
//   generating: the volume of the rectangle the points were drawn from.
enum class VolumeReference { empirical, generating };

struct CalibrationOptions {
    VolumeReference volume_ref = VolumeReference::empirical;
    // Rectangle side lengths are drawn log-uniformly from 10^[lo, hi].
    double side_log10_lo = -2.0;
    double side_log10_hi = 0.0;
};

std::string calibration_convention(const CalibrationOptions& opts);

// One trial of the uniformity null: draw a rectangle, draw k points uniformly
// inside it, return the PCA-to-reference volume ratio about the rectangle
// center. Rank-deficient draws return 0.
double calibration_trial(std::size_t k, std::size_t d, Rng& rng,
                         const CalibrationOptions& opts = {});

struct AlphaEntry {
    double alpha = 0.0;
    std::size_t trials = 0;
    double quantile = 0.0;
    std::uint64_t seed = 0;
    std::string convention;
};

// Calibrated alpha_{k,d} thresholds with full provenance. Entries for d = 1
// are rejected: the ratio is identically 1 there.
class AlphaTable {
public:
    void insert(std::size_t k, std::size_t d, const AlphaEntry& entry);
    // Throws alpha_unavailable; no interpolation across (k, d).
    double lookup(std::size_t k, std::size_t d) const;
    const AlphaEntry& entry(std::size_t k, std::size_t d) const;
    bool contains(std::size_t k, std::size_t d) const;
    std::size_t size() const { return entries_.size(); }

    // CSV header: d,k,alpha,trials,quantile,seed,convention. Rows ordered by
    // (d, k). Loading refuses entries whose convention does not match
    // `expected_convention` (empty string = accept any).
    void save(const std::filesystem::path& path) const;
    static AlphaTable load(const std::filesystem::path& path,
                           const std::string& expected_convention);

    const std::map<std::pair<std::size_t, std::size_t>, AlphaEntry>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<std::size_t, std::size_t>, AlphaEntry> entries_;  // keyed (d, k)
};

// ceil(quantile * trials)-th smallest trial ratio. Per-trial seeds are
// counter-based (trial t uses seed xor t), so parallel and serial runs are
// bit-identical. Defaults follow the calibration procedure: 5e5 trials at
// quantile 5e-3.
double estimate_alpha(std::size_t k, std::size_t d, std::size_t trials = 500000,
                      double quantile = 5e-3, std::uint64_t seed = 20200817, int threads = 1,
                      const CalibrationOptions& opts = {});

AlphaEntry estimate_alpha_entry(std::size_t k, std::size_t d, std::size_t trials = 500000,
                                double quantile = 5e-3, std::uint64_t seed = 20200817,
                                int threads = 1, const CalibrationOptions& opts = {});

}  // namespace lncmi
