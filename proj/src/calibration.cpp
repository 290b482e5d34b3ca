#include "lncmi/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "lncmi/errors.hpp"
#include "lncmi/localgeom.hpp"
#include "lncmi/parallel.hpp"

namespace lncmi {

std::string calibration_convention(const CalibrationOptions& opts) {
    return std::string(kLocalGeomConvention) + ":" +
           (opts.volume_ref == VolumeReference::empirical ? "empirical" : "generating");
}

double calibration_trial(std::size_t k, std::size_t d, Rng& rng,
                         const CalibrationOptions& opts) {
    if (d < 2) throw error("calibration_trial: d must be >= 2 (ratio is identically 1 in 1-D)");
    if (k < 1) throw error("calibration_trial: k must be >= 1");

    std::vector<double> sides(d);
    for (std::size_t j = 0; j < d; ++j) {
        sides[j] = std::pow(10.0, rng.uniform(opts.side_log10_lo, opts.side_log10_hi));
    }
    // Offsets of the k draws from the rectangle center.
    std::vector<double> offsets(k * d);
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t j = 0; j < d; ++j) {
            offsets[l * d + j] = sides[j] * (rng.uniform01() - 0.5);
        }
    }

    const auto [v_pca, rank_deficient] = pca_rect_volume_from_offsets(offsets, k, d);
    if (rank_deficient) return 0.0;

    double v_ref = 1.0;
    if (opts.volume_ref == VolumeReference::generating) {
        for (double s : sides) v_ref *= s;
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            double m = 0.0;
            for (std::size_t l = 0; l < k; ++l) m = std::max(m, std::abs(offsets[l * d + j]));
            v_ref *= 2.0 * m;
        }
        if (v_ref == 0.0) return 0.0;
    }
    return v_pca / v_ref;
}

double estimate_alpha(std::size_t k, std::size_t d, std::size_t trials, double quantile,
                      std::uint64_t seed, int threads, const CalibrationOptions& opts) {
    return estimate_alpha_entry(k, d, trials, quantile, seed, threads, opts).alpha;
}

AlphaEntry estimate_alpha_entry(std::size_t k, std::size_t d, std::size_t trials, double quantile,
                                std::uint64_t seed, int threads, const CalibrationOptions& opts) {
    if (d < 2) throw error("estimate_alpha: d must be >= 2");
    if (quantile <= 0.0 || quantile > 1.0) throw error("estimate_alpha: quantile must be in (0,1]");
    if (static_cast<double>(trials) < 1.0 / quantile) {
        throw error("estimate_alpha: trials must be >= 1/quantile");
    }

    // Counter-based per-trial seeds; the base seed is scrambled first so that
    // nearby seeds do not share trial sets under the xor counter.
    const std::uint64_t base = splitmix64(seed);
    std::vector<double> ratios(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(base ^ static_cast<std::uint64_t>(t));
        ratios[t] = calibration_trial(k, d, rng, opts);
    });

    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(quantile * static_cast<double>(trials)));
    std::nth_element(ratios.begin(), ratios.begin() + (rank - 1), ratios.end());

    AlphaEntry entry;
    entry.alpha = ratios[rank - 1];
    entry.trials = trials;
    entry.quantile = quantile;
    entry.seed = seed;
    entry.convention = calibration_convention(opts);
    return entry;
}

void AlphaTable::insert(std::size_t k, std::size_t d, const AlphaEntry& entry) {
    if (d < 2) throw error("alpha table: entries for d < 2 are not meaningful");
    entries_[{d, k}] = entry;
}

bool AlphaTable::contains(std::size_t k, std::size_t d) const {
    return entries_.count({d, k}) != 0;
}

double AlphaTable::lookup(std::size_t k, std::size_t d) const {
    return entry(k, d).alpha;
}

const AlphaEntry& AlphaTable::entry(std::size_t k, std::size_t d) const {
    const auto it = entries_.find({d, k});
    if (it == entries_.end()) throw alpha_unavailable(k, d);
    return it->second;
}

void AlphaTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw error("cannot write alpha table: " + path.string());
    out << "d,k,alpha,trials,quantile,seed,convention\n";
    char buf[64];
    for (const auto& [key, e] : entries_) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.alpha);
        out << key.first << ',' << key.second << ',' << buf << ',' << e.trials << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", e.quantile);
        out << buf << ',' << e.seed << ',' << e.convention << '\n';
    }
}

AlphaTable AlphaTable::load(const std::filesystem::path& path,
                            const std::string& expected_convention) {
    std::ifstream in(path);
    if (!in) throw error("cannot open alpha table: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("d,k,alpha,trials,quantile,seed,convention", 0) != 0) {
        throw error("alpha table: unexpected header in " + path.string());
    }
    AlphaTable table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) {
            throw error("alpha table: malformed line " + std::to_string(lineno));
        }
        AlphaEntry e;
        const std::size_t d = std::stoul(cells[0]);
        const std::size_t k = std::stoul(cells[1]);
        e.alpha = std::stod(cells[2]);
        e.trials = std::stoul(cells[3]);
        e.quantile = std::stod(cells[4]);
        e.seed = std::stoull(cells[5]);
        e.convention = cells[6];
        if (!expected_convention.empty() && e.convention != expected_convention) {
            throw error("alpha table: entry (k=" + std::to_string(k) + ", d=" +
                        std::to_string(d) + ") was calibrated under convention '" + e.convention +
                        "' but this build expects '" + expected_convention + "'");
        }
        table.insert(k, d, e);
    }
    return table;
}

}  // namespace lncmi
