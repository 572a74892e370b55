#pragma once

#include "clustclass/dataset.hpp"

#include <cstddef>
#include <limits>
#include <optional>

namespace clustclass {

// |beta_d| above this counts as a selected feature.
inline constexpr double kSparsityEpsilon = 1e-6;

struct LinearModel {
  Vector beta;
  double beta0 = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(beta.size()); }
  std::size_t nonzero_count(double epsilon = kSparsityEpsilon) const;
  double l1_norm() const { return beta.lpNorm<1>(); }
};

// min 1/2|b|^2 + C sum xi + rho |b|_1
struct SvmPenalizedParams {
  double C = 1.0;
  double rho = 0.0;
  void validate() const;
};

// min 1/2|b|^2 + lambda_plus sum xi + lambda_minus sum zeta   s.t. |b|_1 <= T.
// T = +inf drops the budget (plain weighted linear SVM).
struct SvmConstrainedParams {
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
  double T = std::numeric_limits<double>::infinity();
  void validate() const;
};

struct SvmSolution {
  LinearModel model;
  double objective = 0.0;
  Vector xi;    // positive-sample slacks (tight)
  Vector zeta;  // negative-sample slacks (tight)
};

struct SolverOptions {
  // Relative duality-gap target used to certify the returned objective.
  double tol = 1e-6;
  // Interior-point Newton steps; 0 selects the default of 200.
  std::size_t max_iterations = 0;
  // Candidate start. The returned solution is never worse than this point
  // (after projecting it into the budget and re-fitting its offset).
  std::optional<LinearModel> warm_start;
};

SvmSolution train_penalized(const Dataset& train, const SvmPenalizedParams& params,
                            const SolverOptions& options = {});

// Positives and negatives are row matrices with the same column count.
SvmSolution train_constrained(const Matrix& positives, const Matrix& negatives,
                              const SvmConstrainedParams& params, const SolverOptions& options = {});

double decision_value(const LinearModel& m, const Eigen::Ref<const Vector>& x);
// Decision value exactly 0 classifies as -1.
int predict_label(const LinearModel& m, const Eigen::Ref<const Vector>& x);

// Objectives re-evaluated with tight slacks max(0, 1 - y f(x)).
double penalized_objective(const Dataset& train, const SvmPenalizedParams& params,
                           const LinearModel& m);
double constrained_objective(const Matrix& positives, const Matrix& negatives,
                             const SvmConstrainedParams& params, const LinearModel& m);

}  // namespace clustclass

namespace clustclass::detail {

// train_constrained without the non-empty-positives precondition. A cluster
// with no positives trains on negatives alone (optimum: beta = 0, offset <= -1).
SvmSolution train_cluster(const Matrix& positives, const Matrix& negatives,
                          const SvmConstrainedParams& params, const SolverOptions& options);

}  // namespace clustclass::detail
