#pragma once

#include "clustclass/quantize.hpp"

#include <array>
#include <span>
#include <vector>

namespace clustclass {

// Per-feature class-conditional level distributions (naive Bayes).
struct LrtModel {
  // pmf[j][c][v]: feature j, class c (0 = positive, 1 = negative), level v.
  std::vector<std::array<std::vector<double>, 2>> pmf;
  double smoothing = 1.0;

  std::size_t dim() const { return pmf.size(); }
  // log p(level | y=+1) - log p(level | y=-1). A zero denominator gives +inf,
  // a zero numerator -inf, and 0/0 is taken as 0.
  double log_ratio(std::size_t feature, int level) const;
};

inline constexpr std::size_t kDefaultLrtK = 4;

// pmf = (count(level, class) + smoothing) / (count(class) + smoothing * levels).
LrtModel fit_lrt(const QuantizedDataset& train, double smoothing = 1.0);

std::vector<double> log_ratios(const LrtModel& m, std::span<const int> row);

struct KlrtScore {
  double score = 0.0;                     // sum of the K largest log-ratios
  std::vector<std::size_t> top_features;  // descending ratio, ties -> lower index
};

KlrtScore score_klrt(const LrtModel& m, std::span<const int> row, std::size_t k);
// Scores every row of a quantized dataset.
std::vector<double> score_klrt_all(const LrtModel& m, const QuantizedDataset& data, std::size_t k);

struct FeatureImportance {
  std::size_t feature = 0;
  double score = 0.0;          // mean of the two standardized quantities
  std::size_t top_count = 0;   // rows where the feature was the 1-LRT pick
  double mean_ratio = 0.0;     // mean likelihood ratio over rows
};

// 1-LRT importance ranking, sorted by descending score (ties -> lower index).
// Infinite ratios (possible only with zero smoothing) are capped at the
// largest finite ratio seen. A quantity with zero variance across features
// standardizes to 0 everywhere.
std::vector<FeatureImportance> feature_importance(const LrtModel& m, const QuantizedDataset& test);

}  // namespace clustclass
