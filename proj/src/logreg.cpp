#include "clustclass/logreg.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clustclass {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double kkt_residual(const Vector& theta, const LossAndGradient& lg, double lambda) {
  double r = std::abs(lg.grad_theta0);
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double g = lg.grad_theta(j);
    const double rj = theta(j) != 0.0 ? std::abs(g + lambda * (theta(j) > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(g) - lambda);
    r = std::max(r, rj);
  }
  return r;
}

}  // namespace

LossAndGradient logistic_loss(const Matrix& x, const std::vector<int>& labels, const Vector& theta,
                              double theta0) {
  if (static_cast<std::size_t>(x.rows()) != labels.size() || x.cols() != theta.size())
    throw ArgumentError("logistic_loss: dimension mismatch");
  LossAndGradient out;
  const Vector margin = (x * theta).array() + theta0;
  Vector coef(x.rows());  // d loss_i / d margin_i
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double y = labels[static_cast<std::size_t>(i)];
    out.value += softplus(-y * margin(i));
    coef(i) = -y * sigmoid(-y * margin(i));
  }
  out.grad_theta = x.transpose() * coef;
  out.grad_theta0 = coef.sum();
  return out;
}

double lr_objective(const Dataset& train, const LogisticModel& m) {
  return logistic_loss(train.features, train.labels, m.theta, m.theta0).value +
         m.lambda * m.theta.lpNorm<1>();
}

LogisticModel train_lr(const Dataset& train, double lambda, const LogisticOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ArgumentError("lambda must be non-negative and finite");
  train.validate(true);
  if (train.count_label(1) == 0 || train.count_label(-1) == 0)
    throw ArgumentError("training data must contain both classes");

  const Matrix& x = train.features;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Matrix aug(n, d + 1);
  aug.leftCols(d) = x;
  aug.col(d).setOnes();

  LogisticModel m{Vector::Zero(d), 0.0, lambda};
  auto objective = [&](const Vector& th, double th0) {
    return logistic_loss(x, train.labels, th, th0).value + lambda * th.lpNorm<1>();
  };
  LossAndGradient lg = logistic_loss(x, train.labels, m.theta, m.theta0);
  const double scale = std::max(1.0, std::max(lg.grad_theta.cwiseAbs().maxCoeff(),
                                              std::abs(lg.grad_theta0)));
  double value = lg.value;
  double residual = kkt_residual(m.theta, lg, lambda);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    if (residual <= options.tol * scale) return m;

    // Quadratic model with Hessian sum_i p_i (1 - p_i) [x_i;1][x_i;1]'.
    const Vector margin = (x * m.theta).array() + m.theta0;
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(margin(i));
      w(i) = std::max(p * (1.0 - p), 1e-300);
    }
    const Matrix h = aug.transpose() * w.asDiagonal() * aug;
    Vector g(d + 1);
    g.head(d) = lg.grad_theta;
    g(d) = lg.grad_theta0;

    // Coordinate descent on g'delta + 1/2 delta'H delta + lambda |theta + delta|_1.
    Vector delta = Vector::Zero(d + 1);
    Vector h_delta = Vector::Zero(d + 1);
    for (int sweep = 0; sweep < 1000; ++sweep) {
      double largest = 0.0;
      for (Eigen::Index j = 0; j <= d; ++j) {
        const double a = h(j, j);
        if (!(a > 0.0)) continue;
        const double b = g(j) + h_delta(j) - a * delta(j);
        double next;
        if (j == d) {
          next = -b / a;
        } else {
          next = soft_threshold(m.theta(j) - b / a, lambda / a) - m.theta(j);
        }
        const double change = next - delta(j);
        if (change != 0.0) {
          h_delta += change * h.col(j);
          delta(j) = next;
          largest = std::max(largest, std::abs(change) * std::sqrt(a));
        }
      }
      if (largest <= 1e-13 * std::max(1.0, std::sqrt(delta.dot(h_delta)))) break;
    }

    const Vector& step_theta = delta.head(d);
    const double predicted = g.dot(delta) +
                             lambda * ((m.theta + step_theta).lpNorm<1>() - m.theta.lpNorm<1>());
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector th = m.theta + t * step_theta;
      const double th0 = m.theta0 + t * delta(d);
      const double trial = objective(th, th0);
      if (trial <= value + 1e-4 * t * predicted || (predicted >= 0 && trial <= value)) {
        m.theta = th;
        m.theta0 = th0;
        value = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    lg = logistic_loss(x, train.labels, m.theta, m.theta0);
    residual = kkt_residual(m.theta, lg, lambda);
    if (!accepted) break;
  }
  if (residual <= options.tol * scale) return m;
  throw SolverError("logistic regression did not converge (KKT residual " + std::to_string(residual) + ")",
                    std::vector<double>(m.theta.data(), m.theta.data() + m.theta.size()), m.theta0,
                    residual);
}

double lr_logit(const LogisticModel& m, const Eigen::Ref<const Vector>& x) {
  if (x.size() != m.theta.size())
    throw ArgumentError("feature row has " + std::to_string(x.size()) + " entries, model expects " +
                        std::to_string(m.theta.size()));
  return m.theta0 + m.theta.dot(x);
}

double predict_proba(const LogisticModel& m, const Eigen::Ref<const Vector>& x) {
  const double p = sigmoid(lr_logit(m, x));
  return std::clamp(p, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
}

double predict_proba_negative(const LogisticModel& m, const Eigen::Ref<const Vector>& x) {
  return 1.0 - predict_proba(m, x);
}

}  // namespace clustclass
