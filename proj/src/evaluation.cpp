#include "clustclass/evaluation.hpp"

#include "clustclass/error.hpp"
#include "clustclass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace clustclass {

namespace {

void check_scored(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw MetricError("scores and labels differ in length (" + std::to_string(scores.size()) + " vs " +
                      std::to_string(labels.size()) + ")");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw MetricError("labels must be +1 or -1");
  }
  if (!pos || !neg) throw MetricError("ROC needs both classes present");
  for (double s : scores)
    if (std::isnan(s)) throw MetricError("score is NaN");
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_scored(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const auto n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const auto n_neg = static_cast<double>(labels.size()) - n_pos;
  constexpr double inf = std::numeric_limits<double>::infinity();

  RocCurve roc;
  roc.points.push_back({0.0, 0.0, inf});
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      if (labels[order[k]] == 1) ++tp;
      else ++fp;
      ++k;
    }
    const double threshold = k < order.size() ? 0.5 * (s + scores[order[k]]) : -inf;
    roc.points.push_back({static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos, threshold});
  }
  double area = 0.0;
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& a = roc.points[i - 1];
    const auto& b = roc.points[i];
    area += (b.false_alarm_rate - a.false_alarm_rate) * 0.5 * (a.detection_rate + b.detection_rate);
  }
  roc.auc = area;
  return roc;
}

double auc(std::span<const double> scores, std::span<const int> labels) { return roc_curve(scores, labels).auc; }

std::string roc_csv(const RocCurve& roc) {
  std::ostringstream out;
  out.precision(17);
  out << "threshold,far,dr\n";
  for (const auto& p : roc.points) out << p.threshold << ',' << p.false_alarm_rate << ',' << p.detection_rate << '\n';
  return out.str();
}

void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << roc_csv(roc);
}

ConfusionMetrics confusion_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw MetricError("predictions and labels differ in length (" + std::to_string(predictions.size()) + " vs " +
                      std::to_string(labels.size()) + ")");
  ConfusionMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i], y = labels[i];
    if ((p != 1 && p != -1) || (y != 1 && y != -1)) throw MetricError("labels must be +1 or -1");
    if (y == 1) (p == 1 ? m.tp : m.fn)++;
    else (p == 1 ? m.fp : m.tn)++;
  }
  if (m.tp + m.fn == 0 || m.fp + m.tn == 0) throw MetricError("confusion metrics need both classes present");
  m.detection_rate = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  m.false_alarm_rate = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
  m.specificity = static_cast<double>(m.tn) / static_cast<double>(m.fp + m.tn);
  m.precision = m.tp + m.fp == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  return m;
}

std::vector<ParamCell> expand_grid(const std::map<std::string, std::vector<double>>& grid) {
  std::vector<ParamCell> cells{ParamCell{}};
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw ArgumentError("grid entry '" + name + "' has no values");
    std::vector<ParamCell> next;
    for (const auto& cell : cells)
      for (double v : values) {
        ParamCell c = cell;
        c[name] = v;
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("folds must be at least 2");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out(labels.size());
  for (int cls : {1, -1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) rows.push_back(i);
    if (rows.size() < folds)
      throw StratificationError("class " + std::to_string(cls) + " has " + std::to_string(rows.size()) +
                                " rows, fewer than " + std::to_string(folds) + " folds");
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t k = 0; k < rows.size(); ++k) out[rows[k]] = k % folds;
  }
  return out;
}

CvResult cross_validate(const Dataset& train, const Trainer& trainer, std::span<const ParamCell> grid,
                        std::size_t folds, std::uint64_t seed) {
  if (grid.empty()) throw ArgumentError("parameter grid is empty");
  const auto fold_of = stratified_folds(train.labels, folds, seed);
  std::vector<Dataset> fit(folds), held(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> in, out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) (fold_of[i] == f ? out : in).push_back(i);
    fit[f] = train.select_rows(in);
    held[f] = train.select_rows(out);
  }

  CvResult r;
  r.cells.assign(grid.begin(), grid.end());
  r.fold_auc.assign(grid.size(), std::vector<double>(folds));
  parallel_for(grid.size() * folds, [&](std::size_t job) {
    const std::size_t c = job / folds, f = job % folds;
    const auto scores = trainer(fit[f], held[f], r.cells[c]);
    r.fold_auc[c][f] = auc(scores, held[f].labels);
  });
  r.mean_auc.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    r.mean_auc[c] = std::accumulate(r.fold_auc[c].begin(), r.fold_auc[c].end(), 0.0) / static_cast<double>(folds);
    if (r.mean_auc[c] > r.mean_auc[r.best]) r.best = c;
  }
  return r;
}

}  // namespace clustclass
