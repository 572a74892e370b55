#include "clustclass/jcc.hpp"

#include "clustclass/error.hpp"
#include "clustclass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clustclass {

namespace {

struct SubsetFit {
  LinearModel model;
  double objective = 0.0;
};

Matrix rows_in_mask(const Matrix& x, std::uint64_t mask) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (mask >> i & 1U) idx.push_back(i);
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(idx[r]);
  return out;
}

// L^n, saturating at max.
std::size_t power_saturating(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
      return std::numeric_limits<std::size_t>::max();
    out *= base;
  }
  return out;
}

}  // namespace

void validate_assignment(const ClusterAssignment& a, int L, std::size_t n_positive) {
  if (a.size() != n_positive)
    throw ArgumentError("assignment has " + std::to_string(a.size()) + " entries, expected " +
                        std::to_string(n_positive));
  for (int c : a)
    if (c < 0 || c >= L)
      throw ArgumentError("cluster id " + std::to_string(c) + " outside [0, " + std::to_string(L) + ")");
}

double JccInstance::budget(int cluster) const {
  return cluster_budgets.empty() ? params.T : cluster_budgets.at(static_cast<std::size_t>(cluster));
}

SvmConstrainedParams JccInstance::cluster_params(int cluster) const {
  SvmConstrainedParams p = params;
  p.T = budget(cluster);
  return p;
}

bool JccInstance::shared_budget() const {
  return std::all_of(cluster_budgets.begin(), cluster_budgets.end(),
                     [&](double t) { return t == budget(0); });
}

void JccInstance::validate() const {
  if (L < 1) throw ArgumentError("L must be at least 1");
  if (positives.rows() < 1 || negatives.rows() < 1)
    throw ArgumentError("both classes need at least one sample");
  if (positives.cols() != negatives.cols()) throw ArgumentError("class feature dimensions differ");
  if (!cluster_budgets.empty() && cluster_budgets.size() != static_cast<std::size_t>(L))
    throw ArgumentError("cluster_budgets must have L entries");
  if (!(intra_weight >= 0.0)) throw ArgumentError("intra-cluster weight must be non-negative");
  params.validate();
  for (double t : cluster_budgets)
    if (!(t >= 0.0)) throw ArgumentError("cluster budgets must be non-negative");
}

double intra_cluster_penalty(const Matrix& positives, const ClusterAssignment& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = i + 1; k < a.size(); ++k)
      if (a[i] == a[k])
        total += (positives.row(static_cast<Eigen::Index>(i)) - positives.row(static_cast<Eigen::Index>(k)))
                     .squaredNorm();
  return total;
}

double jcc_objective(const JccInstance& inst, const ClusterAssignment& a,
                     std::span<const LinearModel> models, double tol) {
  validate_assignment(a, inst.L, static_cast<std::size_t>(inst.positives.rows()));
  if (models.size() != static_cast<std::size_t>(inst.L))
    throw ArgumentError("expected " + std::to_string(inst.L) + " models");
  double total = 0.0;
  for (int l = 0; l < inst.L; ++l) {
    const LinearModel& m = models[static_cast<std::size_t>(l)];
    if (m.beta.size() != inst.positives.cols()) throw ArgumentError("model dimension mismatch");
    if (m.l1_norm() > inst.budget(l) + tol)
      throw InfeasibleError("cluster " + std::to_string(l) + " weights have l1 norm " +
                            std::to_string(m.l1_norm()) + " above budget " + std::to_string(inst.budget(l)));
    double value = 0.5 * m.beta.squaredNorm();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] == l)
        value += inst.params.lambda_plus *
                 std::max(0.0, 1.0 - decision_value(m, inst.positives.row(static_cast<Eigen::Index>(i)).transpose()));
    value += inst.params.lambda_minus *
             (1.0 + ((inst.negatives * m.beta).array() + m.beta0)).max(0.0).sum();
    total += value;
  }
  return total + inst.intra_weight * intra_cluster_penalty(inst.positives, a);
}

JccSolution solve_exact(const JccInstance& inst, std::size_t cap) {
  inst.validate();
  const auto n = static_cast<std::size_t>(inst.positives.rows());
  const auto L = static_cast<std::size_t>(inst.L);
  if (n > 62 || power_saturating(L, n) > cap)
    throw SizeError("exact enumeration needs L^N+ = " + std::to_string(L) + "^" + std::to_string(n) +
                    " assignments, above the cap of " + std::to_string(cap) +
                    "; use the alternating trainer instead");

  const bool shared = inst.shared_budget();
  const std::size_t n_masks = std::size_t{1} << n;
  const std::size_t budget_slots = shared ? 1 : L;
  std::vector<SubsetFit> fits(n_masks * budget_slots);
  const std::uint64_t full = n_masks - 1;
  const SolverOptions options;
  parallel_for(fits.size(), [&](std::size_t slot) {
    const std::uint64_t mask = slot % n_masks;
    const int cluster = static_cast<int>(slot / n_masks);
    if (L == 1 && mask != full) return;
    const auto sol = detail::train_cluster(rows_in_mask(inst.positives, mask), inst.negatives,
                                           inst.cluster_params(cluster), options);
    fits[slot] = SubsetFit{sol.model, sol.objective};
  });

  std::vector<double> pair_dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      pair_dist[i * n + k] =
          (inst.positives.row(static_cast<Eigen::Index>(i)) - inst.positives.row(static_cast<Eigen::Index>(k)))
              .squaredNorm();

  ClusterAssignment current(n, 0), best_assignment;
  std::vector<std::uint64_t> masks(L, 0);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  std::size_t evaluated = 0;

  auto evaluate = [&] {
    ++evaluated;
    std::fill(masks.begin(), masks.end(), 0);
    for (std::size_t i = 0; i < n; ++i) masks[static_cast<std::size_t>(current[i])] |= std::uint64_t{1} << i;
    double value = 0.0;
    for (std::size_t l = 0; l < L; ++l) value += fits[(shared ? 0 : l) * n_masks + masks[l]].objective;
    if (inst.intra_weight > 0.0) {
      double penalty = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k)
          if (current[i] == current[k]) penalty += pair_dist[i * n + k];
      value += inst.intra_weight * penalty;
    }
    if (!found || value < best - 1e-12 * std::max(1.0, std::abs(best))) {
      found = true;
      best = value;
      best_assignment = current;
    }
  };

  // Depth-first in lexicographic order. With a shared budget, position i may
  // only open cluster (largest label so far + 1).
  auto visit = [&](auto&& self, std::size_t pos, int largest) -> void {
    if (pos == n) {
      evaluate();
      return;
    }
    const int limit = shared ? std::min(static_cast<int>(L) - 1, largest + 1) : static_cast<int>(L) - 1;
    for (int c = 0; c <= limit; ++c) {
      current[pos] = c;
      self(self, pos + 1, std::max(largest, c));
    }
  };
  visit(visit, 0, -1);

  JccSolution sol;
  sol.assignment = best_assignment;
  sol.assignments_evaluated = evaluated;
  std::fill(masks.begin(), masks.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    masks[static_cast<std::size_t>(best_assignment[i])] |= std::uint64_t{1} << i;
  for (std::size_t l = 0; l < L; ++l) {
    const auto& fit = fits[(shared ? 0 : l) * n_masks + masks[l]];
    sol.models.push_back(fit.model);
    sol.per_cluster_objectives.push_back(fit.objective);
    if (masks[l] == 0) sol.empty_clusters.push_back(static_cast<int>(l));
  }
  sol.intra_penalty = inst.intra_weight * intra_cluster_penalty(inst.positives, best_assignment);
  sol.objective = best;
  return sol;
}

MipEquivalenceReport verify_mip_equivalence(const JccInstance& inst, const JccSolution& solution) {
  const auto n = static_cast<std::size_t>(inst.positives.rows());
  const auto L = static_cast<std::size_t>(inst.L);
  validate_assignment(solution.assignment, inst.L, n);

  // z_il indicator matrix.
  std::vector<std::vector<int>> z(n, std::vector<int>(L, 0));
  for (std::size_t i = 0; i < n; ++i) z[i][static_cast<std::size_t>(solution.assignment[i])] = 1;

  std::vector<std::vector<double>> f(n, std::vector<double>(L));
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < L; ++l) {
      f[i][l] = decision_value(solution.models[l], inst.positives.row(static_cast<Eigen::Index>(i)).transpose());
      largest = std::max(largest, std::abs(1.0 - f[i][l]));
    }

  MipEquivalenceReport r;
  r.big_m = largest + 1.0;
  r.unassigned_slacks_zero = true;
  double mip = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    const LinearModel& m = solution.models[l];
    double value = 0.5 * m.beta.squaredNorm();
    for (std::size_t i = 0; i < n; ++i) {
      int elsewhere = 0;
      for (std::size_t k = 0; k < L; ++k)
        if (k != l) elsewhere += z[i][k];
      // Smallest feasible slack under the big-M row.
      const double xi = std::max(0.0, 1.0 - f[i][l] - r.big_m * elsewhere);
      if (z[i][l] == 0) {
        r.max_unassigned_slack = std::max(r.max_unassigned_slack, xi);
        if (xi != 0.0) r.unassigned_slacks_zero = false;
      }
      value += inst.params.lambda_plus * xi;
    }
    for (Eigen::Index j = 0; j < inst.negatives.rows(); ++j)
      value += inst.params.lambda_minus *
               std::max(0.0, 1.0 + decision_value(m, inst.negatives.row(j).transpose()));
    mip += value;
    if (std::none_of(z.begin(), z.end(), [&](const std::vector<int>& row) { return row[l] == 1; }))
      r.empty_clusters.push_back(static_cast<int>(l));
  }
  if (inst.intra_weight > 0.0) {
    // sigma_{i1 i2} is the smallest binary value with z_i1l + z_i2l - sigma <= 1
    // for all l; the ordered double sum is halved to the unordered convention.
    double ordered = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        int sigma = 0;
        for (std::size_t l = 0; l < L; ++l) sigma = std::max(sigma, z[a][l] + z[b][l] - 1);
        if (sigma)
          ordered += (inst.positives.row(static_cast<Eigen::Index>(a)) -
                      inst.positives.row(static_cast<Eigen::Index>(b)))
                         .squaredNorm();
      }
    mip += inst.intra_weight * 0.5 * ordered;
  }
  r.mip_objective = mip;
  r.jcc_objective = jcc_objective(inst, solution.assignment, solution.models);
  r.difference = r.mip_objective - r.jcc_objective;
  r.objectives_agree = std::abs(r.difference) <= 1e-8;
  return r;
}

MipEquivalenceReport verify_mip_equivalence(const JccInstance& inst) {
  return verify_mip_equivalence(inst, solve_exact(inst));
}

}  // namespace clustclass
