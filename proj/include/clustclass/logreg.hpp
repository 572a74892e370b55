#pragma once

#include "clustclass/dataset.hpp"

#include <cstddef>

namespace clustclass {

struct LogisticModel {
  Vector theta;
  double theta0 = 0.0;
  double lambda = 0.0;
};

struct LogisticOptions {
  // Target for the scaled KKT residual (see train_lr).
  double tol = 1e-6;
  std::size_t max_iterations = 1000;  // proximal Newton steps
};

struct LossAndGradient {
  double value = 0.0;
  Vector grad_theta;
  double grad_theta0 = 0.0;
};

// Negative log-likelihood sum_i log(1 + exp(-y_i (theta'x_i + theta0))) and
// its gradient. Labels are +1/-1.
LossAndGradient logistic_loss(const Matrix& x, const std::vector<int>& labels, const Vector& theta,
                              double theta0);

// NLL + lambda |theta|_1 with theta0 unpenalized.
double lr_objective(const Dataset& train, const LogisticModel& m);

// Proximal Newton. Stops when the KKT residual of the composite objective is
// at most tol * max(1, |gradient at the zero model|_inf); throws SolverError
// carrying the last iterate otherwise.
LogisticModel train_lr(const Dataset& train, double lambda, const LogisticOptions& options = {});

// P(y = +1 | x) = 1 / (1 + exp(-theta0 - theta'x)), kept strictly inside (0, 1).
double predict_proba(const LogisticModel& m, const Eigen::Ref<const Vector>& x);
// 1 - predict_proba.
double predict_proba_negative(const LogisticModel& m, const Eigen::Ref<const Vector>& x);
// theta'x + theta0.
double lr_logit(const LogisticModel& m, const Eigen::Ref<const Vector>& x);

}  // namespace clustclass
