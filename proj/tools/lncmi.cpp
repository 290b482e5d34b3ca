// lncmi - nonparametric mutual information estimation (naive kNN, KSG, LNC),
// alpha calibration, and the experiment drivers around them.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lncmi/bounds.hpp"
#include "lncmi/calibration.hpp"
#include "lncmi/dataset.hpp"
#include "lncmi/errors.hpp"
#include "lncmi/estimators.hpp"
#include "lncmi/experiments.hpp"
#include "lncmi/localgeom.hpp"
#include "lncmi/synthgen.hpp"
#include "lncmi/version.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Comma list, or lo..hi stepping by decades (sigmas) / doubling (sizes).
std::vector<double> parse_sigma_list(const std::string& text) {
    std::vector<double> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const double lo = std::stod(text.substr(0, dots));
        const double hi = std::stod(text.substr(dots + 2));
        double v = lo;
        const bool descending = hi < lo;
        for (int guard = 0; guard < 64; ++guard) {
            out.push_back(v);
            if (descending ? v <= hi * 1.0000001 : v >= hi * 0.9999999) break;
            v = descending ? v / 10.0 : v * 10.0;
        }
        return out;
    }
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        std::size_t lo = std::stoul(text.substr(0, dots));
        const std::size_t hi = std::stoul(text.substr(dots + 2));
        for (; lo <= hi; lo *= 2) out.push_back(lo);
        return out;
    }
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoul(cell));
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

struct CommonArgs {
    std::string input;
    std::string cols;
    std::string estimator = "ksg";
    std::size_t k = 0;
    std::string alpha;        // numeric, or "auto"
    std::string alpha_table;  // path
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string format = "csv";
    double jitter = 1e-10;
    bool no_jitter = false;
    std::string convention = "final";
    bool bits = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_input) {
    if (with_input) {
        cmd->add_option("--input", args.input, "input CSV (header row, empty cell = missing)");
        cmd->add_option("--cols", args.cols, "comma-separated column names or indices");
    }
    cmd->add_option("--est", args.estimator, "estimator: knn, ksg, or lnc");
    cmd->add_option("--alpha", args.alpha, "LNC threshold value, or 'auto' to calibrate now");
    cmd->add_option("--alpha-table", args.alpha_table,
                    "alpha table CSV (default: $LNCMI_ALPHA_TABLE)");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--threads", args.threads, "worker cap (results do not depend on it)");
    cmd->add_option("--out", args.out, "output file (default: stdout)");
    cmd->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jitter", args.jitter, "deduplication jitter amplitude for CSV input");
    cmd->add_flag("--no-jitter", args.no_jitter, "disable input jitter");
    cmd->add_option("--convention", args.convention, "marginal count convention")
        ->check(CLI::IsMember({"final", "draft"}));
    cmd->add_flag("--bits", args.bits, "display estimates in bits instead of nats");
}

lncmi::MarginalConvention convention_of(const CommonArgs& args) {
    return args.convention == "draft" ? lncmi::MarginalConvention::draft_strict
                                      : lncmi::MarginalConvention::final_inclusive;
}

struct ResolvedAlpha {
    std::optional<double> value;
    std::optional<lncmi::AlphaTable> table;
    std::string provenance = "none";
};

// --alpha value | --alpha auto | --alpha-table | $LNCMI_ALPHA_TABLE.
// Missing entries surface later as alpha_unavailable (exit 3).
ResolvedAlpha resolve_alpha(const CommonArgs& args, std::size_t k, std::size_t d) {
    ResolvedAlpha out;
    if (!args.alpha.empty() && args.alpha != "auto") {
        out.value = std::stod(args.alpha);
        out.provenance = "explicit:" + fmt(*out.value);
        return out;
    }
    if (args.alpha == "auto") {
        const lncmi::AlphaEntry entry =
            lncmi::estimate_alpha_entry(k, d, 500000, 5e-3, args.seed ^ 0xa1f4aULL, args.threads);
        out.value = entry.alpha;
        out.provenance = "auto-calibrated:" + fmt(entry.alpha) +
                         " trials=" + std::to_string(entry.trials) +
                         " quantile=" + fmt(entry.quantile) + " " + entry.convention;
        return out;
    }
    std::string path = args.alpha_table;
    if (path.empty()) {
        if (const char* env = std::getenv("LNCMI_ALPHA_TABLE")) path = env;
    }
    if (!path.empty()) {
        out.table = lncmi::AlphaTable::load(path, "");
        for (const auto& [key, entry] : out.table->entries()) {
            if (entry.convention.rfind(lncmi::kLocalGeomConvention, 0) != 0) {
                throw lncmi::error("alpha table " + path + " uses convention '" +
                                   entry.convention + "', incompatible with this build ('" +
                                   lncmi::kLocalGeomConvention + "')");
            }
        }
        out.provenance = "table:" + path;
    }
    return out;
}

lncmi::EstimatorConfig make_config(const CommonArgs& args, const ResolvedAlpha& alpha) {
    lncmi::EstimatorConfig cfg;
    cfg.k = args.k;
    cfg.alpha = alpha.value;
    cfg.alpha_table = alpha.table ? &*alpha.table : nullptr;
    cfg.convention = convention_of(args);
    cfg.threads = args.threads;
    return cfg;
}

std::string config_echo(const std::string& command, const CommonArgs& args,
                        const std::string& alpha_provenance) {
    std::ostringstream ss;
    ss << "lncmi " << lncmi::kVersion << " command=" << command << " est=" << args.estimator
       << " k=" << args.k << " convention=" << args.convention
       << " alpha=" << (alpha_provenance.empty() ? "none" : alpha_provenance)
       << " seed=" << args.seed << " threads=" << args.threads
       << " jitter=" << (args.no_jitter ? "off" : fmt(args.jitter))
       << " units=" << (args.bits ? "bits" : "nats");
    return ss.str();
}

json config_json(const std::string& command, const CommonArgs& args,
                 const std::string& alpha_provenance) {
    json j;
    j["tool"] = "lncmi";
    j["version"] = lncmi::kVersion;
    j["command"] = command;
    j["estimator"] = args.estimator;
    j["k"] = args.k;
    j["convention"] = args.convention;
    j["alpha_provenance"] = alpha_provenance;
    j["seed"] = args.seed;
    j["threads"] = args.threads;
    j["jitter"] = args.no_jitter ? 0.0 : args.jitter;
    j["units"] = args.bits ? "bits" : "nats";
    return j;
}

// Output goes to --out or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw lncmi::error("cannot write output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

lncmi::Dataset load_columns(const CommonArgs& args) {
    if (args.input.empty()) throw lncmi::error("--input is required");
    lncmi::MaskedDataset masked = lncmi::ingest_csv(args.input);
    if (!args.no_jitter && args.jitter > 0.0) {
        masked = lncmi::deduplicate_jitter(masked, args.jitter, args.seed);
    }
    std::vector<std::size_t> cols;
    if (!args.cols.empty()) {
        for (const std::string& c : split_commas(args.cols)) {
            try {
                cols.push_back(masked.column_index(c));
            } catch (const lncmi::error&) {
                cols.push_back(std::stoul(c));
            }
        }
    } else {
        for (std::size_t j = 0; j < masked.d(); ++j) cols.push_back(j);
    }
    const lncmi::ColumnPairView view = masked.select_complete(cols, 2);
    return masked.materialize(view);
}

template <typename Records>
void emit_records(const Records& records, const std::string& command, const CommonArgs& args,
                  const std::string& alpha_provenance) {
    Sink sink(args.out);
    if (args.format == "json") {
        json j;
        j["config"] = config_json(command, args, alpha_provenance);
        j["records"] = records;
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "# " << config_echo(command, args, alpha_provenance) << '\n';
        lncmi::write_csv(records, sink.stream());
    }
}

}  // namespace

namespace lncmi {

// JSON mirrors of the CSV record fields.
void to_json(json& j, const SweepRecord& r) {
    j = json{{"experiment", r.experiment}, {"estimator", r.estimator}, {"family", r.family},
             {"sigma", r.sigma},           {"n", r.n},                 {"k", r.k},
             {"seed", r.seed},             {"estimate", r.estimate}};
    j["alpha"] = r.alpha ? json(*r.alpha) : json();
    j["truth"] = r.truth ? json(*r.truth) : json();
    j["abs_error"] = r.abs_error ? json(*r.abs_error) : json();
}

void to_json(json& j, const ComplexityRecord& r) {
    j = json{{"experiment", "complexity"}, {"i_true", r.i_true},   {"eps", r.eps},
             {"k", r.k},                   {"d", r.d},             {"n_s", r.n_s},
             {"n_bound", r.n_bound},       {"trials", r.trials},   {"censored", r.censored}};
}

void to_json(json& j, const RankStabilityRecord& r) {
    j = json{{"experiment", "rank"},         {"estimator", r.estimator},
             {"rho", r.rho},                 {"spearman_mean", r.spearman_mean},
             {"ci_low", r.ci_low},           {"ci_high", r.ci_high},
             {"repeats", r.repeats}};
}

void to_json(json& j, const TripletRecord& r) {
    j = json{{"experiment", "synergy"},   {"estimator", r.estimator},
             {"x", r.x},                  {"y", r.y},
             {"z", r.z},                  {"multi_info", r.multi_info},
             {"max_pair_mi", r.max_pair_mi}, {"ss_infinite", r.ss_infinite},
             {"interaction_info", r.interaction_info}};
    j["ss"] = r.ss_infinite ? json("inf") : json(r.ss);
}

}  // namespace lncmi

namespace {

int cmd_estimate(const CommonArgs& args) {
    const lncmi::Dataset data = load_columns(args);
    const ResolvedAlpha alpha = resolve_alpha(args, args.k, data.d());
    const lncmi::EstimatorConfig cfg = make_config(args, alpha);
    const lncmi::MIEstimate est = lncmi::run_estimator(args.estimator, data, cfg);
    const double scale = args.bits ? 1.0 / std::log(2.0) : 1.0;

    Sink sink(args.out);
    if (args.format == "json") {
        json j;
        j["config"] = config_json("estimate", args, alpha.provenance);
        j["n"] = data.n();
        j["d"] = data.d();
        j["value"] = est.value * scale;
        j["corrected_fraction"] = est.corrected_fraction;
        j["floored_count"] = est.floored_count;
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "# " << config_echo("estimate", args, alpha.provenance) << '\n'
                      << "estimator,k,n,d,value,corrected_fraction,floored_count\n"
                      << args.estimator << ',' << args.k << ',' << data.n() << ',' << data.d()
                      << ',' << fmt(est.value * scale) << ',' << fmt(est.corrected_fraction)
                      << ',' << est.floored_count << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kNN mutual information estimation with local nonuniformity correction"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* estimate = app.add_subcommand("estimate", "estimate MI for selected columns");
    add_common(estimate, args, true);
    estimate->add_option("--k", args.k, "neighbor count")->required();

    auto* calibrate = app.add_subcommand("calibrate", "estimate alpha_{k,d} thresholds");
    add_common(calibrate, args, false);
    std::size_t cal_k = 0, cal_d = 0;
    std::size_t cal_trials = 500000;
    double cal_quantile = 5e-3;
    std::string volume_ref = "empirical";
    std::string table_out;
    bool full_grid = false;
    calibrate->add_option("--k", cal_k, "neighbor count");
    calibrate->add_option("--d", cal_d, "dimension (>= 2)");
    calibrate->add_option("--trials", cal_trials, "calibration trials");
    calibrate->add_option("--quantile", cal_quantile, "trial-ratio quantile");
    calibrate->add_option("--volume-ref", volume_ref, "trial denominator volume")
        ->check(CLI::IsMember({"empirical", "generating"}));
    calibrate->add_option("--table-out", table_out, "write/extend an alpha table CSV");
    calibrate->add_flag("--full-default-grid", full_grid,
                        "calibrate d in [2,10], k in [d,20] (slow; builds the default table)");

    auto* sweep = app.add_subcommand("sweep", "noise sweep over functional families");
    add_common(sweep, args, false);
    std::string families_arg = "linear";
    std::string sigmas_arg = "1e-1..1e-5";
    std::size_t sweep_n = 5000;
    std::string estimators_arg;
    std::size_t n_seeds = 10;
    sweep->add_option("--k", args.k, "neighbor count")->required();
    sweep->add_option("--family,--families", families_arg, "comma-separated family names");
    sweep->add_option("--sigmas", sigmas_arg, "comma list or lo..hi by decades");
    sweep->add_option("--n", sweep_n, "sample size per run");
    sweep->add_option("--est-list", estimators_arg, "comma list of estimators (overrides --est)");
    sweep->add_option("--seeds", n_seeds, "number of seeds (seed, seed+1, ...)");

    auto* converge = app.add_subcommand("converge", "KSG vs LNC across sample sizes");
    add_common(converge, args, false);
    std::string conv_family = "linear";
    double conv_sigma = 1e-3;
    std::string n_grid_arg = "125..8000";
    converge->add_option("--k", args.k, "neighbor count")->required();
    converge->add_option("--family", conv_family, "family name");
    converge->add_option("--sigma", conv_sigma, "noise level");
    converge->add_option("--n-grid", n_grid_arg, "comma list or lo..hi doubling");
    converge->add_option("--seeds", n_seeds, "number of seeds");

    auto* complexity = app.add_subcommand("complexity", "empirical sample complexity vs bound");
    add_common(complexity, args, false);
    std::string targets_arg = "0.7,1.4,2.1,2.8,3.5,4.2";
    lncmi::ComplexityOptions copts;
    complexity->add_option("--k", args.k, "neighbor count")->required();
    complexity->add_option("--i-targets", targets_arg, "target MI values (nats)");
    complexity->add_option("--eps", copts.eps, "error tolerance");
    complexity->add_option("--trials", copts.trials, "seeds per probed N");
    complexity->add_option("--n-cap", copts.n_cap, "censoring cap");

    auto* rank = app.add_subcommand("rank", "ranking stability under subsampling");
    add_common(rank, args, true);
    lncmi::RankStabilityOptions ropts;
    std::string fractions_arg = "0.9,0.7,0.5,0.3,0.1";
    std::string planted_ladder_arg;
    rank->add_option("--k", args.k, "neighbor count")->required();
    rank->add_option("--top-m", ropts.top_m, "size of the ranked set");
    rank->add_option("--fractions", fractions_arg, "subsample fractions");
    rank->add_option("--repeats", ropts.repeats, "repeats per fraction");
    rank->add_option("--min-rows", ropts.min_rows, "complete-row requirement per pair");
    rank->add_option("--planted-ladder", planted_ladder_arg,
                     "use the synthetic ladder instead of --input: n,pairs");

    auto* synergy = app.add_subcommand("synergy", "scan triplets for synergy");
    add_common(synergy, args, true);
    lncmi::SynergyOptions sopts;
    std::string planted_triple_arg;
    synergy->add_option("--k", args.k, "neighbor count")->required();
    synergy->add_option("--pair-threshold", sopts.pair_threshold, "max pairwise MI to consider");
    synergy->add_option("--ss-threshold", sopts.ss_threshold, "minimum synergy score");
    synergy->add_option("--min-rows", sopts.min_rows, "complete-row requirement");
    synergy->add_option("--planted-triple", planted_triple_arg,
                        "use the synthetic (x+y) mod 1 triple instead of --input: n,sigma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (estimate->parsed()) return cmd_estimate(args);

        if (calibrate->parsed()) {
            lncmi::CalibrationOptions opts;
            opts.volume_ref = volume_ref == "generating" ? lncmi::VolumeReference::generating
                                                         : lncmi::VolumeReference::empirical;
            const std::uint64_t seed = args.seed == 0 ? 20200817 : args.seed;
            lncmi::AlphaTable table;
            if (!table_out.empty() && std::ifstream(table_out).good()) {
                table = lncmi::AlphaTable::load(table_out, "");
            }
            Sink sink(args.out);
            std::ostream& os = sink.stream();
            os << "# lncmi " << lncmi::kVersion << " command=calibrate trials=" << cal_trials
               << " quantile=" << fmt(cal_quantile) << " volume-ref=" << volume_ref
               << " seed=" << seed << " threads=" << args.threads << '\n';
            os << "d,k,alpha\n";
            const auto run_one = [&](std::size_t k, std::size_t d) {
                const lncmi::AlphaEntry entry = lncmi::estimate_alpha_entry(
                    k, d, cal_trials, cal_quantile, seed, args.threads, opts);
                table.insert(k, d, entry);
                os << d << ',' << k << ',' << fmt(entry.alpha) << '\n';
            };
            if (full_grid) {
                for (std::size_t d = 2; d <= 10; ++d) {
                    for (std::size_t k = d; k <= 20; ++k) run_one(k, d);
                }
            } else {
                if (cal_k == 0 || cal_d == 0) {
                    throw lncmi::error("calibrate: pass --k and --d, or --full-default-grid");
                }
                run_one(cal_k, cal_d);
            }
            if (!table_out.empty()) table.save(table_out);
            return 0;
        }

        if (sweep->parsed()) {
            std::vector<lncmi::Family> families;
            for (const std::string& f : split_commas(families_arg)) {
                families.push_back(lncmi::family_from_name(f));
            }
            std::vector<std::string> estimators = estimators_arg.empty()
                                                      ? split_commas(args.estimator)
                                                      : split_commas(estimators_arg);
            std::vector<std::uint64_t> seeds(n_seeds);
            for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = args.seed + i;
            std::size_t max_d = 2;
            for (lncmi::Family f : families) {
                max_d = std::max(max_d, lncmi::family_dimension(f));
            }
            const ResolvedAlpha alpha = resolve_alpha(args, args.k, max_d);
            const lncmi::EstimatorConfig cfg = make_config(args, alpha);
            const auto records = lncmi::noise_sweep(families, parse_sigma_list(sigmas_arg),
                                                    sweep_n, estimators, seeds, cfg);
            emit_records(records, "sweep", args, alpha.provenance);
            return 0;
        }

        if (converge->parsed()) {
            const lncmi::Family family = lncmi::family_from_name(conv_family);
            std::vector<std::uint64_t> seeds(n_seeds);
            for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = args.seed + i;
            const ResolvedAlpha alpha =
                resolve_alpha(args, args.k, lncmi::family_dimension(family));
            const lncmi::EstimatorConfig cfg = make_config(args, alpha);
            const auto records = lncmi::convergence_run(family, conv_sigma,
                                                        parse_size_list(n_grid_arg), seeds, cfg);
            emit_records(records, "converge", args, alpha.provenance);
            return 0;
        }

        if (complexity->parsed()) {
            copts.k = args.k;
            copts.seed = args.seed == 0 ? 7 : args.seed;
            copts.threads = args.threads;
            const auto records = lncmi::sample_complexity(parse_sigma_list(targets_arg), copts);
            emit_records(records, "complexity", args, "none");
            return 0;
        }

        if (rank->parsed() || synergy->parsed()) {
            std::optional<lncmi::MaskedDataset> masked;
            if (rank->parsed() && !planted_ladder_arg.empty()) {
                const auto parts = split_commas(planted_ladder_arg);
                if (parts.size() != 2) throw lncmi::error("--planted-ladder expects n,pairs");
                masked = lncmi::planted_ladder(std::stoul(parts[0]), std::stoul(parts[1]),
                                               args.seed);
            } else if (synergy->parsed() && !planted_triple_arg.empty()) {
                const auto parts = split_commas(planted_triple_arg);
                if (parts.size() != 2) throw lncmi::error("--planted-triple expects n,sigma");
                const lncmi::Dataset triple = lncmi::planted_synergy_triple(
                    std::stoul(parts[0]), std::stod(parts[1]), args.seed);
                std::vector<std::uint8_t> present(triple.values().size(), 1);
                masked = lncmi::MaskedDataset(triple.values(), present, triple.column_names());
            } else {
                if (args.input.empty()) throw lncmi::error("--input is required");
                masked = lncmi::ingest_csv(args.input);
                if (!args.no_jitter && args.jitter > 0.0) {
                    masked = lncmi::deduplicate_jitter(*masked, args.jitter, args.seed);
                }
            }
            const ResolvedAlpha alpha = resolve_alpha(args, args.k, rank->parsed() ? 2 : 3);
            const lncmi::EstimatorConfig cfg = make_config(args, alpha);
            if (rank->parsed()) {
                ropts.fractions.clear();
                for (double f : parse_sigma_list(fractions_arg)) ropts.fractions.push_back(f);
                ropts.seed = args.seed == 0 ? 11 : args.seed;
                const auto records = lncmi::rank_stability(*masked, args.estimator, cfg, ropts);
                emit_records(records, "rank", args, alpha.provenance);
            } else {
                const auto records = lncmi::synergy_scan(*masked, args.estimator, cfg, sopts);
                emit_records(records, "synergy", args, alpha.provenance);
            }
            return 0;
        }
    } catch (const lncmi::alpha_unavailable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const lncmi::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
