#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lncmi {

// Immutable N x d sample matrix with named columns. All entries are finite.
class Dataset {
public:
    Dataset(std::vector<double> values, std::vector<std::string> column_names);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    double at(std::size_t row, std::size_t col) const { return values_[row * d_ + col]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::string>& column_names() const { return names_; }
    std::size_t column_index(const std::string& name) const;

    Dataset select_columns(const std::vector<std::size_t>& cols) const;

private:
    std::vector<double> values_;  // row-major
    std::vector<std::string> names_;
    std::size_t n_;
    std::size_t d_;
};

// Rows of a MaskedDataset on which every selected column is present.
struct ColumnPairView {
    std::vector<std::size_t> columns;
    std::vector<std::size_t> rows;  // indices of jointly-present rows, ascending
    std::size_t effective_rows() const { return rows.size(); }
};

// Dataset plus a per-cell presence mask, as ingested from CSV. Estimator code
// never sees missing values: a view is materialized into a dense Dataset first.
class MaskedDataset {
public:
    MaskedDataset(std::vector<double> values, std::vector<std::uint8_t> present,
                  std::vector<std::string> column_names);

    std::size_t n() const { return n_; }
    std::size_t d() const { return d_; }
    bool present(std::size_t row, std::size_t col) const { return mask_[row * d_ + col] != 0; }
    double at(std::size_t row, std::size_t col) const { return values_[row * d_ + col]; }
    const std::vector<std::string>& column_names() const { return names_; }
    std::size_t column_index(const std::string& name) const;
    bool has_missing() const;

    // Throws insufficient_samples if fewer than min_rows rows are complete.
    ColumnPairView select_complete(const std::vector<std::size_t>& cols,
                                   std::size_t min_rows) const;

    Dataset materialize(const ColumnPairView& view) const;
    // Whole table; requires no missing cells.
    Dataset dense() const;

private:
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::string> names_;
    std::size_t n_;
    std::size_t d_;
};

// UTF-8, comma-separated, header row, '.' decimal separator. Empty cells or
// missing_token mark absent values. No quoting; parse errors carry 1-based
// row/column locations.
MaskedDataset ingest_csv(const std::filesystem::path& path, const std::string& missing_token = "");
MaskedDataset ingest_csv(std::istream& in, const std::string& missing_token = "");

void write_csv(const Dataset& data, std::ostream& out);

// Per-entry uniform noise of half-width amplitude_rel * column range (range 1
// if degenerate). amplitude_rel = 0 returns the input unchanged. Pure given
// the seed.
Dataset deduplicate_jitter(const Dataset& data, double amplitude_rel, std::uint64_t seed);

// Same, applied to present cells only; column ranges come from present values.
MaskedDataset deduplicate_jitter(const MaskedDataset& data, double amplitude_rel,
                                 std::uint64_t seed);

}  // namespace lncmi
