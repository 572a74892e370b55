#pragma once

#include "clustclass/jcc.hpp"
#include "clustclass/slsvm.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace clustclass {

enum class AccInit { kRandom, kKMeans, kGiven };

struct AccConfig {
  int L = 1;
  // lambda_plus / lambda_minus are shared by every cluster.
  SvmConstrainedParams params;
  std::size_t max_iters = 100;
  // A cycle that lowers Z by less than this counts as "not decreasing".
  double z_tolerance = 1e-8;
  AccInit init = AccInit::kRandom;
  std::uint64_t seed = 0;
  std::size_t restarts = 5;  // ignored for AccInit::kGiven
  ClusterAssignment initial_assignment;  // AccInit::kGiven only
};

struct AccModel {
  int L = 1;
  std::vector<LinearModel> models;
  std::vector<std::size_t> cluster_features;  // routing feature set, sorted
  std::vector<double> trace;                  // Z after each classification step
  ClusterAssignment final_assignment;
  bool converged = false;  // stopped by the rule rather than max_iters

  double objective() const { return trace.empty() ? 0.0 : trace.back(); }
};

// Features whose absolute training correlation with the labels exceeds
// `threshold`. Falls back to every feature when none qualifies.
std::vector<std::size_t> select_cluster_features(const Dataset& train, double threshold = 0.01);
std::vector<std::size_t> all_features(std::size_t dim);

// Sum of per-cluster SVM objectives for a fixed assignment and models.
double acc_objective(const Matrix& positives, const Matrix& negatives, const SvmConstrainedParams& params,
                     const ClusterAssignment& a, std::span<const LinearModel> models);

// Alternates per-cluster sparse SVM training and re-clustering until no
// assignment changes, Z stops decreasing, or max_iters cycles. Keeps the best
// of `restarts` runs. Throws InvariantError if Z rises by more than
// z_tolerance between cycles.
AccModel acc_train(const Matrix& positives, const Matrix& negatives, const AccConfig& cfg,
                   std::span<const std::size_t> cluster_features);
AccModel acc_train(const Dataset& train, const AccConfig& cfg, std::span<const std::size_t> cluster_features);

// Moves each positive to the cluster with the largest projection on the
// routing features, but only when its full decision value under that
// cluster is at least its value under the current one.
ClusterAssignment recluster(const Matrix& positives, std::span<const LinearModel> models,
                            std::span<const std::size_t> cluster_features, const ClusterAssignment& current);

struct AccPrediction {
  int cluster = 0;
  double decision_value = 0.0;
  int label = -1;
};

// Routes by the largest projection (ties -> lower cluster), then classifies
// with that cluster's model.
AccPrediction acc_predict(const AccModel& m, const Eigen::Ref<const Vector>& x);
std::vector<double> acc_scores(const AccModel& m, const Matrix& x);

// One-shot k-means clustering of the positives on the routing features, then
// one SVM per cluster against all negatives: budgeted (sparse) or with the
// budget removed. No alternation.
AccModel ct_baseline(const Matrix& positives, const Matrix& negatives, int L, bool sparse,
                     const SvmConstrainedParams& params, std::uint64_t seed,
                     std::span<const std::size_t> cluster_features);

}  // namespace clustclass
