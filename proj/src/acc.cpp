#include "clustclass/acc.hpp"

#include "clustclass/error.hpp"
#include "clustclass/kmeans.hpp"
#include "clustclass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace clustclass {

namespace {

struct ClassificationStep {
  std::vector<LinearModel> models;
  std::vector<double> objectives;
  double z = 0.0;
};

Matrix cluster_rows(const Matrix& positives, const ClusterAssignment& a, int cluster) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == cluster) idx.push_back(static_cast<Eigen::Index>(i));
  Matrix out(static_cast<Eigen::Index>(idx.size()), positives.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = positives.row(idx[r]);
  return out;
}

ClassificationStep classify(const Matrix& positives, const Matrix& negatives, const SvmConstrainedParams& params,
                            int L, const ClusterAssignment& a, const std::vector<LinearModel>* warm) {
  ClassificationStep step;
  step.models.resize(static_cast<std::size_t>(L));
  step.objectives.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    SolverOptions options;
    if (warm) options.warm_start = (*warm)[static_cast<std::size_t>(l)];
    const auto sol = detail::train_cluster(cluster_rows(positives, a, l), negatives, params, options);
    step.models[static_cast<std::size_t>(l)] = sol.model;
    step.objectives[static_cast<std::size_t>(l)] = sol.objective;
  }
  step.z = std::accumulate(step.objectives.begin(), step.objectives.end(), 0.0);
  return step;
}

double projection(const Eigen::Ref<const Vector>& x, const LinearModel& m, std::span<const std::size_t> features) {
  double a = 0.0;
  for (std::size_t f : features) a += x(static_cast<Eigen::Index>(f)) * m.beta(static_cast<Eigen::Index>(f));
  return a;
}

int route(const Eigen::Ref<const Vector>& x, std::span<const LinearModel> models,
          std::span<const std::size_t> features) {
  int best = 0;
  double best_a = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < models.size(); ++l) {
    const double a = projection(x, models[l], features);
    if (a > best_a) {
      best_a = a;
      best = static_cast<int>(l);
    }
  }
  return best;
}

std::vector<int> cluster_sizes(const ClusterAssignment& a, int L) {
  std::vector<int> sizes(static_cast<std::size_t>(L), 0);
  for (int c : a) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

// Refills each empty cluster with the positive of largest slack (under its
// current cluster's model) taken from the most populous cluster.
ClusterAssignment reseed_empty(const Matrix& positives, const ClusterAssignment& a, int L,
                               std::span<const LinearModel> models) {
  ClusterAssignment out = a;
  auto sizes = cluster_sizes(out, L);
  for (int empty = 0; empty < L; ++empty) {
    if (sizes[static_cast<std::size_t>(empty)] != 0) continue;
    const auto donor = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    if (sizes[static_cast<std::size_t>(donor)] <= 1) break;
    std::size_t worst = 0;
    double worst_slack = -1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i] != donor) continue;
      const double slack = std::max(
          0.0, 1.0 - decision_value(models[static_cast<std::size_t>(donor)],
                                    positives.row(static_cast<Eigen::Index>(i)).transpose()));
      if (slack > worst_slack) {
        worst_slack = slack;
        worst = i;
      }
    }
    out[worst] = empty;
    --sizes[static_cast<std::size_t>(donor)];
    sizes[static_cast<std::size_t>(empty)] = 1;
  }
  return out;
}

ClusterAssignment random_assignment(std::size_t n, int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, L - 1);
  ClusterAssignment a(n);
  for (auto& c : a) c = pick(rng);
  // Every cluster starts with at least one positive when N+ >= L.
  if (n >= static_cast<std::size_t>(L)) {
    auto sizes = cluster_sizes(a, L);
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    for (int c = 0; c < L; ++c) {
      while (sizes[static_cast<std::size_t>(c)] == 0) {
        const std::size_t i = any(rng);
        if (sizes[static_cast<std::size_t>(a[i])] > 1) {
          --sizes[static_cast<std::size_t>(a[i])];
          a[i] = c;
          ++sizes[static_cast<std::size_t>(c)];
        }
      }
    }
  }
  return a;
}

Matrix select_columns(const Matrix& x, std::span<const std::size_t> cols) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  // splitmix64 step so neighbouring seeds give unrelated streams.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (restart + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

AccModel run_once(const Matrix& positives, const Matrix& negatives, const AccConfig& cfg,
                  std::span<const std::size_t> features, ClusterAssignment assignment) {
  AccModel m;
  m.L = cfg.L;
  m.cluster_features.assign(features.begin(), features.end());
  ClassificationStep step = classify(positives, negatives, cfg.params, cfg.L, assignment, nullptr);
  m.trace.push_back(step.z);

  for (std::size_t cycle = 1; cycle < cfg.max_iters; ++cycle) {
    ClusterAssignment next = recluster(positives, step.models, features, assignment);
    if (next == assignment) {
      m.converged = true;
      break;
    }
    ClassificationStep candidate = classify(positives, negatives, cfg.params, cfg.L, next, &step.models);
    const auto sizes = cluster_sizes(next, cfg.L);
    if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
      ClusterAssignment reseeded = reseed_empty(positives, next, cfg.L, step.models);
      if (reseeded != next) {
        ClassificationStep alt = classify(positives, negatives, cfg.params, cfg.L, reseeded, &step.models);
        if (alt.z < candidate.z) {
          candidate = std::move(alt);
          next = std::move(reseeded);
        }
      }
    }
    const double previous = m.trace.back();
    if (candidate.z > previous + cfg.z_tolerance)
      throw InvariantError("alternating objective increased from " + std::to_string(previous) + " to " +
                           std::to_string(candidate.z));
    m.trace.push_back(candidate.z);
    assignment = std::move(next);
    step = std::move(candidate);
    if (previous - step.z < cfg.z_tolerance) {
      m.converged = true;
      break;
    }
  }
  m.models = std::move(step.models);
  m.final_assignment = std::move(assignment);
  return m;
}

}  // namespace

std::vector<std::size_t> all_features(std::size_t dim) {
  std::vector<std::size_t> f(dim);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

std::vector<std::size_t> select_cluster_features(const Dataset& train, double threshold) {
  const Vector corr = label_correlations(train);
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < corr.size(); ++j)
    if (std::abs(corr(j)) > threshold) out.push_back(static_cast<std::size_t>(j));
  if (out.empty()) return all_features(train.cols());
  return out;
}

double acc_objective(const Matrix& positives, const Matrix& negatives, const SvmConstrainedParams& params,
                     const ClusterAssignment& a, std::span<const LinearModel> models) {
  double z = 0.0;
  for (std::size_t l = 0; l < models.size(); ++l)
    z += constrained_objective(cluster_rows(positives, a, static_cast<int>(l)), negatives, params, models[l]);
  return z;
}

ClusterAssignment recluster(const Matrix& positives, std::span<const LinearModel> models,
                            std::span<const std::size_t> cluster_features, const ClusterAssignment& current) {
  validate_assignment(current, static_cast<int>(models.size()), static_cast<std::size_t>(positives.rows()));
  ClusterAssignment next = current;
  for (std::size_t i = 0; i < current.size(); ++i) {
    const Vector x = positives.row(static_cast<Eigen::Index>(i)).transpose();
    const int target = route(x, models, cluster_features);
    const int here = current[i];
    if (target == here) continue;
    if (decision_value(models[static_cast<std::size_t>(target)], x) >=
        decision_value(models[static_cast<std::size_t>(here)], x))
      next[i] = target;
  }
  return next;
}

AccModel acc_train(const Matrix& positives, const Matrix& negatives, const AccConfig& cfg,
                   std::span<const std::size_t> cluster_features) {
  if (cfg.L < 1) throw ArgumentError("L must be at least 1");
  if (positives.rows() < 1 || negatives.rows() < 1)
    throw ArgumentError("both classes need at least one sample");
  if (positives.rows() < cfg.L) throw ArgumentError("L exceeds the number of positive samples");
  if (positives.cols() != negatives.cols()) throw ArgumentError("class feature dimensions differ");
  if (cluster_features.empty()) throw ArgumentError("routing feature set is empty");
  for (std::size_t f : cluster_features)
    if (f >= static_cast<std::size_t>(positives.cols())) throw ArgumentError("routing feature index out of range");
  if (cfg.max_iters < 1) throw ArgumentError("max_iters must be at least 1");
  cfg.params.validate();

  std::vector<std::size_t> features(cluster_features.begin(), cluster_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  const auto n = static_cast<std::size_t>(positives.rows());
  if (cfg.init == AccInit::kGiven) {
    validate_assignment(cfg.initial_assignment, cfg.L, n);
    return run_once(positives, negatives, cfg, features, cfg.initial_assignment);
  }
  const std::size_t runs = std::max<std::size_t>(1, cfg.restarts);
  std::vector<AccModel> results(runs);
  const Matrix routed = select_columns(positives, features);
  parallel_for(runs, [&](std::size_t r) {
    const std::uint64_t seed = restart_seed(cfg.seed, r);
    const ClusterAssignment start = cfg.init == AccInit::kKMeans ? kmeans(routed, cfg.L, seed).assignment
                                                                 : random_assignment(n, cfg.L, seed);
    results[r] = run_once(positives, negatives, cfg, features, start);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs; ++r)
    if (results[r].objective() < results[best].objective()) best = r;
  return std::move(results[best]);
}

AccModel acc_train(const Dataset& train, const AccConfig& cfg, std::span<const std::size_t> cluster_features) {
  return acc_train(train.class_rows(1), train.class_rows(-1), cfg, cluster_features);
}

AccPrediction acc_predict(const AccModel& m, const Eigen::Ref<const Vector>& x) {
  if (m.models.empty()) throw ArgumentError("model has no clusters");
  if (x.size() != m.models.front().beta.size())
    throw ArgumentError("feature row has " + std::to_string(x.size()) + " entries, model expects " +
                        std::to_string(m.models.front().beta.size()));
  AccPrediction p;
  p.cluster = route(x, m.models, m.cluster_features);
  p.decision_value = decision_value(m.models[static_cast<std::size_t>(p.cluster)], x);
  p.label = p.decision_value > 0.0 ? 1 : -1;
  return p;
}

std::vector<double> acc_scores(const AccModel& m, const Matrix& x) {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out[static_cast<std::size_t>(i)] = acc_predict(m, x.row(i).transpose()).decision_value;
  return out;
}

AccModel ct_baseline(const Matrix& positives, const Matrix& negatives, int L, bool sparse,
                     const SvmConstrainedParams& params, std::uint64_t seed,
                     std::span<const std::size_t> cluster_features) {
  if (L < 1) throw ArgumentError("L must be at least 1");
  if (positives.rows() < L) throw ArgumentError("L exceeds the number of positive samples");
  if (negatives.rows() < 1) throw ArgumentError("negative class is empty");
  if (cluster_features.empty()) throw ArgumentError("routing feature set is empty");
  SvmConstrainedParams p = params;
  if (!sparse) p.T = std::numeric_limits<double>::infinity();
  p.validate();

  AccModel m;
  m.L = L;
  m.cluster_features.assign(cluster_features.begin(), cluster_features.end());
  std::sort(m.cluster_features.begin(), m.cluster_features.end());
  m.final_assignment = kmeans(select_columns(positives, m.cluster_features), L, seed).assignment;
  const auto step = classify(positives, negatives, p, L, m.final_assignment, nullptr);
  m.models = step.models;
  m.trace = {step.z};
  m.converged = true;
  return m;
}

}  // namespace clustclass
