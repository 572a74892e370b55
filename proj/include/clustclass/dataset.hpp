#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace clustclass {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Labeled feature matrix. Labels are +1 / -1.
struct Dataset {
  Matrix features;                       // N x D
  std::vector<int> labels;               // length N
  std::vector<std::string> feature_names;
  MissingMask missing_mask;              // N x D, true = originally missing

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t count_label(int label) const;

  // Throws SchemaError when dimensions, labels or names are inconsistent.
  // With `require_finite`, also rejects NaN/inf cells.
  void validate(bool require_finite) const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  // Rows of one class, as a dense matrix.
  Matrix class_rows(int label) const;
};

// Builds a dataset with an all-false missing mask and default names f0..f{D-1}
// when `names` is empty.
Dataset make_dataset(Matrix features, std::vector<int> labels,
                     std::vector<std::string> names = {});

// CSV: header row, decimal reals, empty cell or "NA" (or any non-numeric
// text) is missing. Labels may be {+1,-1} or {1,0}; 0 maps to -1.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);
Dataset parse_csv(const std::string& text, const std::string& label_column);
// Same, but a missing label column is allowed: every label is then -1 and
// `has_labels` is set to false.
Dataset parse_csv_optional_label(const std::string& text, const std::string& label_column, bool& has_labels);
Dataset load_csv_optional_label(const std::filesystem::path& path, const std::string& label_column,
                                bool& has_labels);
// Writes features then the label column; missing cells are written as NA.
void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& label_column = "label");

// Replaces every missing cell with the mean of that feature's observed cells.
Dataset impute_missing(const Dataset& d);

// Random disjoint row partition with round(N * train_fraction) training rows.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

// Zero-mean / unit-variance scaling estimated on a training split.
// Constant features keep scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& x);
  static Standardizer identity(std::size_t dim);
  Matrix apply(const Matrix& x) const;
  Vector apply_row(const Eigen::Ref<const Vector>& x) const;
  Dataset apply(const Dataset& d) const;
};

// Pearson correlation of each feature column with the labels; constant
// columns get 0.
Vector label_correlations(const Dataset& d);

// ---------------------------------------------------------------------------
// Longitudinal records -> per-factor time-block features.

struct FactorRecord {
  std::string factor_id;
  int year = 0;
  double value = 0.0;
};

enum class EarlyBlockMode { kSum, kAverage };

// For each factor emits four features: totals for target_year-1, -2, -3 and
// an aggregate (sum by default, or mean) over all earlier years. Output is
// factor-major: [f0_b1, f0_b2, f0_b3, f0_b4, f1_b1, ...]. Records whose
// factor is not listed are ignored. Any record dated at or after
// target_year throws LeakageError.
std::vector<double> summarize_time_blocks(std::span<const FactorRecord> records,
                                          std::span<const std::string> factor_ids,
                                          int target_year,
                                          EarlyBlockMode mode = EarlyBlockMode::kSum);

// Column names matching summarize_time_blocks' layout ("<factor>@b1" ...).
std::vector<std::string> time_block_names(std::span<const std::string> factor_ids);

}  // namespace clustclass
