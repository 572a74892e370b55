#include "clustclass/klrt.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace clustclass {

namespace {

std::vector<int> row_of(const QuantizedDataset& data, Eigen::Index i) {
  std::vector<int> row(data.cols());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = data.levels(i, static_cast<Eigen::Index>(j));
  return row;
}

std::vector<double> standardize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  std::vector<double> out(v.size(), 0.0);
  if (!(var > 1e-300)) return out;
  const double sd = std::sqrt(var);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
  return out;
}

}  // namespace

double LrtModel::log_ratio(std::size_t feature, int level) const {
  if (feature >= pmf.size()) throw ArgumentError("feature index out of range");
  const auto& pos = pmf[feature][0];
  const auto& neg = pmf[feature][1];
  if (level < 0 || static_cast<std::size_t>(level) >= pos.size())
    throw ArgumentError("level " + std::to_string(level) + " out of range for feature " +
                        std::to_string(feature));
  const double num = pos[static_cast<std::size_t>(level)];
  const double den = neg[static_cast<std::size_t>(level)];
  if (num == 0.0 && den == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  if (num == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(num) - std::log(den);
}

LrtModel fit_lrt(const QuantizedDataset& train, double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing))
    throw ArgumentError("smoothing must be non-negative and finite");
  if (train.level_counts.size() != train.cols() || train.labels.size() != train.rows())
    throw ArgumentError("quantized dataset is inconsistent");
  std::array<double, 2> class_count{0.0, 0.0};
  for (int y : train.labels) class_count[y > 0 ? 0 : 1] += 1.0;
  if (class_count[0] == 0.0 || class_count[1] == 0.0)
    throw FitError("likelihood ratio fit needs both classes in the training data");

  LrtModel m;
  m.smoothing = smoothing;
  m.pmf.resize(train.cols());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const auto levels = static_cast<std::size_t>(train.level_counts[j]);
    std::array<std::vector<double>, 2> counts{std::vector<double>(levels, 0.0),
                                              std::vector<double>(levels, 0.0)};
    for (std::size_t i = 0; i < train.rows(); ++i) {
      const int v = train.levels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v < 0 || static_cast<std::size_t>(v) >= levels)
        throw ArgumentError("level out of range in quantized training data");
      counts[train.labels[i] > 0 ? 0 : 1][static_cast<std::size_t>(v)] += 1.0;
    }
    for (int c = 0; c < 2; ++c) {
      const double denom = class_count[c] + smoothing * static_cast<double>(levels);
      for (auto& x : counts[c]) x = (x + smoothing) / denom;
    }
    m.pmf[j] = std::move(counts);
  }
  return m;
}

std::vector<double> log_ratios(const LrtModel& m, std::span<const int> row) {
  if (row.size() != m.dim())
    throw ArgumentError("quantized row has " + std::to_string(row.size()) + " entries, model expects " +
                        std::to_string(m.dim()));
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = m.log_ratio(j, row[j]);
  return out;
}

KlrtScore score_klrt(const LrtModel& m, std::span<const int> row, std::size_t k) {
  if (k < 1 || k > m.dim())
    throw ArgumentError("K must lie in [1, " + std::to_string(m.dim()) + "], got " + std::to_string(k));
  const auto ratios = log_ratios(m, row);
  std::vector<std::size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratios[a] > ratios[b]; });
  KlrtScore out;
  out.top_features.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t f : out.top_features) out.score += ratios[f];
  return out;
}

std::vector<double> score_klrt_all(const LrtModel& m, const QuantizedDataset& data, std::size_t k) {
  std::vector<double> scores(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i)
    scores[i] = score_klrt(m, row_of(data, static_cast<Eigen::Index>(i)), k).score;
  return scores;
}

std::vector<FeatureImportance> feature_importance(const LrtModel& m, const QuantizedDataset& test) {
  if (test.rows() == 0) throw ArgumentError("feature importance needs at least one test row");
  const std::size_t d = m.dim();
  std::vector<double> top_count(d, 0.0);
  std::vector<std::vector<double>> ratios(test.rows());
  double largest_finite = 0.0;
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const auto row = row_of(test, static_cast<Eigen::Index>(i));
    const auto top = score_klrt(m, row, 1);
    top_count[top.top_features.front()] += 1.0;
    ratios[i] = log_ratios(m, row);
    for (double& r : ratios[i]) {
      r = std::exp(r);
      if (std::isfinite(r)) largest_finite = std::max(largest_finite, r);
    }
  }
  std::vector<double> mean_ratio(d, 0.0);
  for (const auto& row : ratios)
    for (std::size_t j = 0; j < d; ++j)
      mean_ratio[j] += std::isfinite(row[j]) ? row[j] : largest_finite;
  for (double& v : mean_ratio) v /= static_cast<double>(test.rows());

  const auto z_count = standardize(top_count);
  const auto z_ratio = standardize(mean_ratio);
  std::vector<FeatureImportance> out(d);
  for (std::size_t j = 0; j < d; ++j)
    out[j] = {j, 0.5 * (z_count[j] + z_ratio[j]), static_cast<std::size_t>(top_count[j]), mean_ratio[j]};
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.score > b.score; });
  return out;
}

}  // namespace clustclass
