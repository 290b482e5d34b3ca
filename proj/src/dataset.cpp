#include "lncmi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "lncmi/errors.hpp"
#include "lncmi/rng.hpp"

namespace lncmi {

namespace {

void validate_names(const std::vector<std::string>& names) {
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) throw error("empty column name");
        if (!seen.insert(name).second) throw error("duplicate column name: " + name);
    }
}

}  // namespace

Dataset::Dataset(std::vector<double> values, std::vector<std::string> column_names)
    : values_(std::move(values)), names_(std::move(column_names)) {
    d_ = names_.size();
    if (d_ == 0) throw error("dataset needs at least one column");
    if (values_.empty() || values_.size() % d_ != 0) throw error("dataset shape mismatch");
    n_ = values_.size() / d_;
    validate_names(names_);
    for (double v : values_) {
        if (!std::isfinite(v)) throw error("dataset contains a non-finite value");
    }
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < d_; ++j) {
        if (names_[j] == name) return j;
    }
    throw error("unknown column: " + name);
}

Dataset Dataset::select_columns(const std::vector<std::size_t>& cols) const {
    std::vector<double> vals;
    vals.reserve(n_ * cols.size());
    std::vector<std::string> names;
    for (std::size_t j : cols) {
        if (j >= d_) throw error("column index out of range");
        names.push_back(names_[j]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j : cols) vals.push_back(at(i, j));
    }
    return Dataset(std::move(vals), std::move(names));
}

MaskedDataset::MaskedDataset(std::vector<double> values, std::vector<std::uint8_t> present,
                             std::vector<std::string> column_names)
    : values_(std::move(values)), mask_(std::move(present)), names_(std::move(column_names)) {
    d_ = names_.size();
    if (d_ == 0) throw error("dataset needs at least one column");
    if (values_.size() != mask_.size() || values_.empty() || values_.size() % d_ != 0) {
        throw error("dataset shape mismatch");
    }
    n_ = values_.size() / d_;
    validate_names(names_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (mask_[i] && !std::isfinite(values_[i])) {
            throw error("dataset contains a non-finite value");
        }
    }
}

std::size_t MaskedDataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < d_; ++j) {
        if (names_[j] == name) return j;
    }
    throw error("unknown column: " + name);
}

bool MaskedDataset::has_missing() const {
    return std::find(mask_.begin(), mask_.end(), std::uint8_t{0}) != mask_.end();
}

ColumnPairView MaskedDataset::select_complete(const std::vector<std::size_t>& cols,
                                              std::size_t min_rows) const {
    for (std::size_t j : cols) {
        if (j >= d_) throw error("column index out of range");
    }
    ColumnPairView view;
    view.columns = cols;
    for (std::size_t i = 0; i < n_; ++i) {
        bool all = true;
        for (std::size_t j : cols) {
            if (!present(i, j)) {
                all = false;
                break;
            }
        }
        if (all) view.rows.push_back(i);
    }
    if (view.rows.size() < min_rows) throw insufficient_samples(view.rows.size(), min_rows);
    return view;
}

Dataset MaskedDataset::materialize(const ColumnPairView& view) const {
    std::vector<double> vals;
    vals.reserve(view.rows.size() * view.columns.size());
    std::vector<std::string> names;
    for (std::size_t j : view.columns) names.push_back(names_[j]);
    for (std::size_t i : view.rows) {
        for (std::size_t j : view.columns) vals.push_back(at(i, j));
    }
    return Dataset(std::move(vals), std::move(names));
}

Dataset MaskedDataset::dense() const {
    if (has_missing()) throw error("dataset has missing cells; select complete rows first");
    return Dataset(values_, names_);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

MaskedDataset ingest_csv(std::istream& in, const std::string& missing_token) {
    std::string line;
    if (!std::getline(in, line)) throw error("empty CSV: no header row");
    const std::vector<std::string> names = split_line(strip_cr(line));
    validate_names(names);
    const std::size_t d = names.size();

    std::vector<double> values;
    std::vector<std::uint8_t> present;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty() && in.peek() == EOF) break;  // trailing newline
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != d) {
            throw parse_error("expected " + std::to_string(d) + " cells, got " +
                                  std::to_string(cells.size()),
                              row, cells.size());
        }
        for (std::size_t j = 0; j < d; ++j) {
            const std::string& cell = cells[j];
            if (cell == missing_token || cell.empty()) {
                values.push_back(0.0);
                present.push_back(0);
                continue;
            }
            double v = 0.0;
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec == std::errc::result_out_of_range) {
                throw parse_error("numeric overflow in cell '" + cell + "'", row, j + 1);
            }
            if (ec != std::errc{} || ptr != last) {
                throw parse_error("malformed numeric cell '" + cell + "'", row, j + 1);
            }
            if (!std::isfinite(v)) {
                throw parse_error("non-finite value in cell '" + cell + "'", row, j + 1);
            }
            values.push_back(v);
            present.push_back(1);
        }
    }
    if (values.empty()) throw error("CSV has no data rows");
    return MaskedDataset(std::move(values), std::move(present), names);
}

MaskedDataset ingest_csv(const std::filesystem::path& path, const std::string& missing_token) {
    std::ifstream in(path);
    if (!in) throw error("cannot open file: " + path.string());
    return ingest_csv(in, missing_token);
}

void write_csv(const Dataset& data, std::ostream& out) {
    const auto& names = data.column_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out << ',';
        out << names[j];
    }
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.d(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", data.at(i, j));
            out << buf;
        }
        out << '\n';
    }
}

Dataset deduplicate_jitter(const Dataset& data, double amplitude_rel, std::uint64_t seed) {
    if (amplitude_rel < 0.0) throw error("jitter amplitude must be >= 0");
    if (amplitude_rel == 0.0) return data;

    const std::size_t n = data.n();
    const std::size_t d = data.d();
    std::vector<double> scale(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double lo = data.at(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, data.at(i, j));
            hi = std::max(hi, data.at(i, j));
        }
        const double range = hi - lo;
        scale[j] = range > 0.0 ? range : 1.0;
    }

    Rng rng(seed);
    std::vector<double> vals(data.values());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            vals[i * d + j] += amplitude_rel * scale[j] * (2.0 * rng.uniform01() - 1.0);
        }
    }
    return Dataset(std::move(vals), data.column_names());
}

MaskedDataset deduplicate_jitter(const MaskedDataset& data, double amplitude_rel,
                                 std::uint64_t seed) {
    if (amplitude_rel < 0.0) throw error("jitter amplitude must be >= 0");
    if (amplitude_rel == 0.0) return data;

    const std::size_t n = data.n();
    const std::size_t d = data.d();
    std::vector<double> scale(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        bool any = false;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!data.present(i, j)) continue;
            const double v = data.at(i, j);
            if (!any) {
                lo = hi = v;
                any = true;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        const double range = hi - lo;
        scale[j] = any && range > 0.0 ? range : 1.0;
    }

    Rng rng(seed);
    std::vector<double> vals(n * d);
    std::vector<std::uint8_t> present(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            present[i * d + j] = data.present(i, j) ? 1 : 0;
            const double noise = amplitude_rel * scale[j] * (2.0 * rng.uniform01() - 1.0);
            vals[i * d + j] = data.present(i, j) ? data.at(i, j) + noise : 0.0;
        }
    }
    return MaskedDataset(std::move(vals), std::move(present), data.column_names());
}

}  // namespace lncmi
