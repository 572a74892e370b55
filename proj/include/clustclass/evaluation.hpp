#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "clustclass/dataset.hpp"

namespace clustclass {

struct RocPoint {
  double false_alarm_rate = 0.0;
  double detection_rate = 0.0;
  double threshold = 0.0;  // classify score > threshold as +1
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// Throws MetricError unless both classes are present and lengths match.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);
double auc(std::span<const double> scores, std::span<const int> labels);
// Columns: threshold,far,dr
void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path);
std::string roc_csv(const RocCurve& roc);

struct ConfusionMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  double precision = 0.0;  // 0 when nothing is predicted positive
  double specificity = 0.0;
};

ConfusionMetrics confusion_metrics(std::span<const int> predictions, std::span<const int> labels);

// One grid cell: named hyperparameters.
using ParamCell = std::map<std::string, double>;
// Fits on the first split and returns scores for the second.
using Trainer = std::function<std::vector<double>(const Dataset& train, const Dataset& validation,
                                                  const ParamCell& cell)>;

struct CvResult {
  std::vector<ParamCell> cells;     // grid order
  std::vector<double> mean_auc;     // per cell
  std::vector<std::vector<double>> fold_auc;
  std::size_t best = 0;             // first cell with the maximal mean AUC

  const ParamCell& best_cell() const { return cells.at(best); }
};

// Cartesian product of named value lists, last name varying fastest.
std::vector<ParamCell> expand_grid(const std::map<std::string, std::vector<double>>& grid);

// Stratified fold ids (0..folds-1) per row, each class dealt round-robin after
// a seeded shuffle. Throws StratificationError when a class has fewer rows
// than folds.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

CvResult cross_validate(const Dataset& train, const Trainer& trainer, std::span<const ParamCell> grid,
                        std::size_t folds, std::uint64_t seed);

}  // namespace clustclass
