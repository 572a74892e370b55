#include "clustclass/slsvm.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace clustclass {

namespace {

constexpr std::size_t kDefaultIpmIterations = 200;

// Weighted hinge-loss linear classifier with optional l1 penalty and l1 budget:
//   min 1/2|b|^2 + rho |b|_1 + sum_i cost_i max(0, 1 - y_i (x_i'b + b0))
//   s.t. |b|_1 <= budget
struct HingeProblem {
  const Matrix& x;
  Eigen::ArrayXd y;
  Eigen::ArrayXd cost;
  double rho = 0.0;
  double budget = std::numeric_limits<double>::infinity();

  bool has_budget() const { return std::isfinite(budget); }
  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }
};

double hinge_objective(const HingeProblem& pr, const Vector& beta, double beta0) {
  const Eigen::ArrayXd margin = pr.y * ((pr.x * beta).array() + beta0);
  const double loss = (pr.cost * (1.0 - margin).max(0.0)).sum();
  return 0.5 * beta.squaredNorm() + pr.rho * beta.lpNorm<1>() + loss;
}

// Exact minimizer over the offset of sum_i cost_i max(0, 1 - y_i (f_i + b)),
// a convex piecewise-linear function with breakpoints y_i - f_i. On a flat
// optimal segment the midpoint is returned.
double best_offset(const HingeProblem& pr, const Vector& f) {
  const Eigen::Index n = pr.n();
  std::vector<double> knots(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) knots[static_cast<std::size_t>(i)] = pr.y(i) - f(i);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return knots[static_cast<std::size_t>(a)] < knots[static_cast<std::size_t>(b)];
  });
  double positive_cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (pr.y(i) > 0) positive_cost += pr.cost(i);
  const double eps = 1e-12 * pr.cost.sum();
  // Slope left of every knot is -positive_cost; each knot adds its cost.
  double slope = -positive_cost;
  for (std::size_t k = 0; k < order.size(); ++k) {
    slope += pr.cost(order[k]);
    if (slope >= -eps) {
      const double here = knots[static_cast<std::size_t>(order[k])];
      if (slope <= eps && k + 1 < order.size())
        return 0.5 * (here + knots[static_cast<std::size_t>(order[k + 1])]);
      return here;
    }
  }
  return knots[static_cast<std::size_t>(order.back())];
}

struct Candidate {
  Vector beta;
  double beta0 = 0.0;
  double objective = std::numeric_limits<double>::infinity();
};

// Projects into the budget, re-fits the offset exactly and drops weights at
// round-off level when that does not raise the objective.
Candidate finalize(const HingeProblem& pr, Vector beta) {
  if (pr.has_budget()) {
    const double l1 = beta.lpNorm<1>();
    if (pr.budget <= 0.0)
      beta.setZero();
    else if (l1 > pr.budget)
      beta *= pr.budget / l1;
  }
  Candidate c{beta, 0.0, 0.0};
  c.beta0 = best_offset(pr, pr.x * c.beta);
  c.objective = hinge_objective(pr, c.beta, c.beta0);

  const double cutoff = 1e-9 * std::max(1.0, beta.cwiseAbs().maxCoeff());
  Vector pruned = beta;
  bool changed = false;
  for (Eigen::Index j = 0; j < pruned.size(); ++j) {
    if (pruned(j) != 0.0 && std::abs(pruned(j)) <= cutoff) {
      pruned(j) = 0.0;
      changed = true;
    }
  }
  if (changed) {
    const double b0 = best_offset(pr, pr.x * pruned);
    const double obj = hinge_objective(pr, pruned, b0);
    if (obj <= c.objective + 1e-12 * std::max(1.0, std::abs(c.objective))) c = Candidate{pruned, b0, obj};
  }
  return c;
}

// Mehrotra predictor-corrector interior-point method on the QP
//   z = (p, m, b, xi), beta = p - m, p, m, xi >= 0
//   min 1/2 |p - m|^2 + rho 1'(p + m) + cost'xi
//   s.t. y_i (x_i'(p - m) + b) + xi_i >= 1,  1'(p + m) <= budget.
// Constraints are kept in the form G z + s = h, s >= 0, ordered as
// [margin (N), p >= 0 (D), m >= 0 (D), xi >= 0 (N), budget (0 or 1)].
class InteriorPoint {
 public:
  explicit InteriorPoint(const HingeProblem& pr)
      : pr_(pr),
        n_(pr.n()),
        d_(pr.d()),
        nz_(2 * d_ + 1 + n_),
        nc_(2 * n_ + 2 * d_ + (pr.has_budget() ? 1 : 0)) {
    augmented_.resize(n_, d_ + 1);
    augmented_.leftCols(d_) = pr.x;
    augmented_.col(d_).setOnes();
  }

  struct Result {
    Vector beta;
    double beta0 = 0.0;
    double gap = 0.0;        // s'lambda / max(1, |objective|)
    double infeasibility = 0.0;
  };

  Result run(std::size_t max_iterations, double tol) {
    Vector z = Vector::Zero(nz_);
    z.segment(0, d_).setConstant(1.0);
    z.segment(d_, d_).setConstant(1.0);
    z.tail(n_).setConstant(1.0);
    Vector s = Vector::Ones(nc_);
    // Duals start near stationarity for the xi and bound blocks:
    // cost = lambda_margin + lambda_xi, and rho sits on the p/m bounds.
    Vector lam = Vector::Ones(nc_);
    lam.segment(0, n_) = 0.5 * pr_.cost.matrix();
    lam.segment(n_ + 2 * d_, n_) = 0.5 * pr_.cost.matrix();
    lam.segment(n_, 2 * d_).setConstant(1.0 + pr_.rho);

    const Vector h = rhs_h();
    const Vector q = linear_q();
    const double h_scale = 1.0 + h.cwiseAbs().maxCoeff();
    const double q_scale = 1.0 + q.cwiseAbs().maxCoeff();
    const double target = std::min(tol, 1e-11);

    // Once the gap is closed, round-off in the dual residual can grow again,
    // so the iterate with the smallest combined residual is kept.
    Result best;
    double best_merit = std::numeric_limits<double>::infinity();
    std::size_t stalled = 0;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      const Vector rd = hess(z) + q + gt(lam);
      const Vector rp = g(z) + s - h;
      const double sl = s.dot(lam);
      const double mu = sl / static_cast<double>(nc_);
      const double objective = 0.5 * beta_of(z).squaredNorm() + q.dot(z);
      const double gap = sl / std::max(1.0, std::abs(objective));
      const double infeas = std::max(rp.cwiseAbs().maxCoeff() / h_scale,
                                     rd.cwiseAbs().maxCoeff() / q_scale);
      const double merit = std::max(gap, infeas);
      if (merit < best_merit) {
        best = Result{beta_of(z), z(2 * d_), gap, infeas};
        best_merit = merit;
        stalled = 0;
      } else if (++stalled >= 5) {
        break;
      }
      if (gap <= target && infeas <= 1e-10) break;

      const Vector w = lam.cwiseQuotient(s);
      factor(w);

      // Predictor.
      Vector u = w.cwiseProduct(rp) - lam;
      Vector dz = solve(-rd - gt(u));
      Vector gdz = g(dz);
      Vector ds = -rp - gdz;
      Vector dl = u + w.cwiseProduct(gdz);
      const double a_aff = max_step(s, ds, lam, dl);
      const double mu_aff = (s + a_aff * ds).dot(lam + a_aff * dl) / static_cast<double>(nc_);
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

      // Corrector.
      const Vector rc = (s.cwiseProduct(lam) + ds.cwiseProduct(dl)).array() - sigma * mu;
      u = w.cwiseProduct(rp) - rc.cwiseQuotient(s);
      dz = solve(-rd - gt(u));
      gdz = g(dz);
      ds = -rp - gdz;
      dl = u + w.cwiseProduct(gdz);
      const double alpha = std::min(1.0, 0.99 * max_step(s, ds, lam, dl));
      if (!(alpha > 1e-14) || !dz.allFinite()) break;
      z += alpha * dz;
      s += alpha * ds;
      lam += alpha * dl;
    }
    return best;
  }

 private:
  Vector beta_of(const Vector& z) const { return z.segment(0, d_) - z.segment(d_, d_); }

  Vector rhs_h() const {
    Vector h = Vector::Zero(nc_);
    h.segment(0, n_).setConstant(-1.0);
    if (pr_.has_budget()) h(nc_ - 1) = pr_.budget;
    return h;
  }

  Vector linear_q() const {
    Vector q = Vector::Zero(nz_);
    q.segment(0, 2 * d_).setConstant(pr_.rho);
    q.tail(n_) = pr_.cost.matrix();
    return q;
  }

  Vector hess(const Vector& z) const {
    Vector out = Vector::Zero(nz_);
    const Vector beta = beta_of(z);
    out.segment(0, d_) = beta;
    out.segment(d_, d_) = -beta;
    return out;
  }

  Vector g(const Vector& z) const {
    Vector out(nc_);
    const Vector f = (pr_.x * beta_of(z)).array() + z(2 * d_);
    out.segment(0, n_) = (-(pr_.y * f.array())).matrix() - z.tail(n_);
    out.segment(n_, d_) = -z.segment(0, d_);
    out.segment(n_ + d_, d_) = -z.segment(d_, d_);
    out.segment(n_ + 2 * d_, n_) = -z.tail(n_);
    if (pr_.has_budget()) out(nc_ - 1) = z.segment(0, 2 * d_).sum();
    return out;
  }

  Vector gt(const Vector& lam) const {
    Vector out(nz_);
    const Vector ylm = (pr_.y * lam.segment(0, n_).array()).matrix();
    const Vector u = pr_.x.transpose() * ylm;
    const double lb = pr_.has_budget() ? lam(nc_ - 1) : 0.0;
    out.segment(0, d_) = (-u - lam.segment(n_, d_)).array() + lb;
    out.segment(d_, d_) = (u - lam.segment(n_ + d_, d_)).array() + lb;
    out(2 * d_) = -ylm.sum();
    out.tail(n_) = -lam.segment(0, n_) - lam.segment(n_ + 2 * d_, n_);
    return out;
  }

  // Factors the (2D+1)-dimensional Schur complement of H + G'WG after
  // eliminating the diagonal xi block.
  void factor(const Vector& w) {
    w_margin_ = w.segment(0, n_);
    xi_diag_ = w_margin_ + w.segment(n_ + 2 * d_, n_);
    const Vector omega = w_margin_.cwiseProduct(w.segment(n_ + 2 * d_, n_)).cwiseQuotient(xi_diag_);
    const Matrix a = augmented_.transpose() * omega.asDiagonal() * augmented_;
    const double wb = pr_.has_budget() ? w(nc_ - 1) : 0.0;
    const Eigen::Index k = 2 * d_ + 1;
    Matrix kv = Matrix::Zero(k, k);
    const Matrix axx = a.topLeftCorner(d_, d_);
    const Matrix eye = Matrix::Identity(d_, d_);
    kv.block(0, 0, d_, d_) = eye + axx;
    kv.block(0, d_, d_, d_) = -eye - axx;
    kv.block(d_, 0, d_, d_) = -eye - axx;
    kv.block(d_, d_, d_, d_) = eye + axx;
    kv.topLeftCorner(2 * d_, 2 * d_).array() += wb;
    kv.block(0, 0, d_, d_).diagonal() += w.segment(n_, d_);
    kv.block(d_, d_, d_, d_).diagonal() += w.segment(n_ + d_, d_);
    kv.block(0, 2 * d_, d_, 1) = a.block(0, d_, d_, 1);
    kv.block(d_, 2 * d_, d_, 1) = -a.block(0, d_, d_, 1);
    kv.block(2 * d_, 0, 1, d_) = a.block(d_, 0, 1, d_);
    kv.block(2 * d_, d_, 1, d_) = -a.block(d_, 0, 1, d_);
    kv(2 * d_, 2 * d_) = a(d_, d_);
    ldlt_.compute(kv);
  }

  Vector solve(const Vector& r) const {
    const Eigen::Index k = 2 * d_ + 1;
    const Vector r_xi = r.tail(n_);
    // a_i = -y_i (x_i, -x_i, 1); fold the xi block into the reduced rhs.
    const Vector t = (-(pr_.y * w_margin_.array() * r_xi.array() / xi_diag_.array())).matrix();
    Vector rv = r.head(k);
    const Vector xt = pr_.x.transpose() * t;
    rv.segment(0, d_) += xt;
    rv.segment(d_, d_) -= xt;
    rv(2 * d_) += t.sum();
    const Vector dv = ldlt_.solve(rv);
    const Vector f = (pr_.x * (dv.segment(0, d_) - dv.segment(d_, d_))).array() + dv(2 * d_);
    const Vector a_dv = (-(pr_.y * f.array())).matrix();
    Vector out(nz_);
    out.head(k) = dv;
    out.tail(n_) = (r_xi + w_margin_.cwiseProduct(a_dv)).cwiseQuotient(xi_diag_);
    return out;
  }

  static double max_step(const Vector& s, const Vector& ds, const Vector& lam, const Vector& dl) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (ds(i) < 0) alpha = std::min(alpha, -s(i) / ds(i));
      if (dl(i) < 0) alpha = std::min(alpha, -lam(i) / dl(i));
    }
    return alpha;
  }

  const HingeProblem& pr_;
  Eigen::Index n_, d_, nz_, nc_;
  Matrix augmented_;  // [x, 1]
  Vector w_margin_;
  Vector xi_diag_;
  Eigen::LDLT<Matrix> ldlt_;
};

SvmSolution solve_hinge(const HingeProblem& pr, const SolverOptions& options,
                        Eigen::Index n_positive_first) {
  const std::size_t max_iter = options.max_iterations ? options.max_iterations : kDefaultIpmIterations;
  Candidate best;
  double gap = 0.0, infeas = 0.0;
  if (pr.has_budget() && pr.budget <= 0.0) {
    best = finalize(pr, Vector::Zero(pr.d()));
  } else {
    InteriorPoint ipm(pr);
    const auto r = ipm.run(max_iter, options.tol);
    gap = r.gap;
    infeas = r.infeasibility;
    best = finalize(pr, r.beta);
  }
  const bool certified = gap <= options.tol && infeas <= std::sqrt(options.tol);
  if (options.warm_start) {
    if (options.warm_start->beta.size() != pr.d())
      throw ArgumentError("warm start dimension does not match the data");
    Candidate warm = finalize(pr, options.warm_start->beta);
    if (warm.objective < best.objective) best = std::move(warm);
  }
  if (!certified) {
    throw SolverError("hinge solver did not reach tolerance (gap " + std::to_string(gap) +
                          ", infeasibility " + std::to_string(infeas) + ")",
                      std::vector<double>(best.beta.data(), best.beta.data() + best.beta.size()),
                      best.beta0, std::max(gap, infeas));
  }

  SvmSolution sol;
  sol.model = LinearModel{best.beta, best.beta0};
  sol.objective = best.objective;
  const Eigen::ArrayXd slack =
      (1.0 - pr.y * ((pr.x * best.beta).array() + best.beta0)).max(0.0);
  if (n_positive_first >= 0) {
    sol.xi = slack.head(n_positive_first).matrix();
    sol.zeta = slack.tail(pr.n() - n_positive_first).matrix();
  } else {
    std::vector<double> xi, zeta;
    for (Eigen::Index i = 0; i < pr.n(); ++i) (pr.y(i) > 0 ? xi : zeta).push_back(slack(i));
    sol.xi = Eigen::Map<Vector>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    sol.zeta = Eigen::Map<Vector>(zeta.data(), static_cast<Eigen::Index>(zeta.size()));
  }
  return sol;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix x(top.rows() + bottom.rows(), top.cols());
  x.topRows(top.rows()) = top;
  x.bottomRows(bottom.rows()) = bottom;
  return x;
}

}  // namespace

std::size_t LinearModel::nonzero_count(double epsilon) const {
  return static_cast<std::size_t>((beta.array().abs() > epsilon).count());
}

void SvmPenalizedParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ArgumentError("C must be a positive finite number");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ArgumentError("rho must be non-negative and finite");
}

void SvmConstrainedParams::validate() const {
  if (!(lambda_plus > 0.0) || !std::isfinite(lambda_plus))
    throw ArgumentError("lambda_plus must be a positive finite number");
  if (!(lambda_minus > 0.0) || !std::isfinite(lambda_minus))
    throw ArgumentError("lambda_minus must be a positive finite number");
  if (!(T >= 0.0)) throw ArgumentError("T must be non-negative");
}

SvmSolution train_penalized(const Dataset& train, const SvmPenalizedParams& params,
                            const SolverOptions& options) {
  params.validate();
  train.validate(true);
  if (train.count_label(1) == 0 || train.count_label(-1) == 0)
    throw ArgumentError("training data must contain both classes");
  Eigen::ArrayXd y(static_cast<Eigen::Index>(train.rows()));
  for (std::size_t i = 0; i < train.rows(); ++i) y(static_cast<Eigen::Index>(i)) = train.labels[i];
  const HingeProblem pr{train.features, y, Eigen::ArrayXd::Constant(y.size(), params.C), params.rho,
                        std::numeric_limits<double>::infinity()};
  return solve_hinge(pr, options, -1);
}

namespace detail {

SvmSolution train_cluster(const Matrix& positives, const Matrix& negatives,
                          const SvmConstrainedParams& params, const SolverOptions& options) {
  params.validate();
  if (negatives.rows() == 0) throw ArgumentError("negative class is empty");
  if (positives.rows() > 0 && positives.cols() != negatives.cols())
    throw ArgumentError("positive and negative feature dimensions differ");
  const Matrix x = positives.rows() > 0 ? stack_rows(positives, negatives) : negatives;
  const Eigen::Index np = positives.rows();
  Eigen::ArrayXd y(x.rows());
  Eigen::ArrayXd cost(x.rows());
  y.head(np).setConstant(1.0);
  y.tail(x.rows() - np).setConstant(-1.0);
  cost.head(np).setConstant(params.lambda_plus);
  cost.tail(x.rows() - np).setConstant(params.lambda_minus);
  const HingeProblem pr{x, y, cost, 0.0, params.T};
  return solve_hinge(pr, options, np);
}

}  // namespace detail

SvmSolution train_constrained(const Matrix& positives, const Matrix& negatives,
                              const SvmConstrainedParams& params, const SolverOptions& options) {
  if (positives.rows() == 0) throw ArgumentError("positive class is empty");
  return detail::train_cluster(positives, negatives, params, options);
}

double decision_value(const LinearModel& m, const Eigen::Ref<const Vector>& x) {
  if (x.size() != m.beta.size())
    throw ArgumentError("feature row has " + std::to_string(x.size()) + " entries, model expects " +
                        std::to_string(m.beta.size()));
  return x.dot(m.beta) + m.beta0;
}

int predict_label(const LinearModel& m, const Eigen::Ref<const Vector>& x) {
  return decision_value(m, x) > 0.0 ? 1 : -1;
}

double penalized_objective(const Dataset& train, const SvmPenalizedParams& params,
                           const LinearModel& m) {
  Eigen::ArrayXd y(static_cast<Eigen::Index>(train.rows()));
  for (std::size_t i = 0; i < train.rows(); ++i) y(static_cast<Eigen::Index>(i)) = train.labels[i];
  const HingeProblem pr{train.features, y, Eigen::ArrayXd::Constant(y.size(), params.C), params.rho,
                        std::numeric_limits<double>::infinity()};
  return hinge_objective(pr, m.beta, m.beta0);
}

double constrained_objective(const Matrix& positives, const Matrix& negatives,
                             const SvmConstrainedParams& params, const LinearModel& m) {
  double value = 0.5 * m.beta.squaredNorm();
  if (positives.rows() > 0)
    value += params.lambda_plus *
             (1.0 - ((positives * m.beta).array() + m.beta0)).max(0.0).sum();
  if (negatives.rows() > 0)
    value += params.lambda_minus *
             (1.0 + ((negatives * m.beta).array() + m.beta0)).max(0.0).sum();
  return value;
}

}  // namespace clustclass
