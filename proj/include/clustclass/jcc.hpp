#pragma once

#include "clustclass/slsvm.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace clustclass {

// Cluster of each positive sample, 0-based (cluster l here is cluster l+1 in
// one-based reports).
using ClusterAssignment = std::vector<int>;

// Throws ArgumentError unless every id lies in [0, L) and the length matches.
void validate_assignment(const ClusterAssignment& a, int L, std::size_t n_positive);

// Joint clustering-and-classification problem: L sparse linear SVMs, one per
// cluster of positives, each trained against all negatives.
struct JccInstance {
  Matrix positives;  // N+ x D
  Matrix negatives;  // N- x D
  int L = 1;
  SvmConstrainedParams params;
  // Optional per-cluster l1 budgets; empty means params.T for every cluster.
  std::vector<double> cluster_budgets;
  // Weight of the intra-cluster distance penalty.
  double intra_weight = 0.0;

  double budget(int cluster) const;
  SvmConstrainedParams cluster_params(int cluster) const;
  bool shared_budget() const;
  void validate() const;
};

// Sum over unordered pairs {i1, i2} in the same cluster of |x_i1 - x_i2|^2.
// The ordered double sum counts every pair twice.
double intra_cluster_penalty(const Matrix& positives, const ClusterAssignment& a);

// Full objective of an assignment and per-cluster models, slacks at their
// tight values. Negative slacks count once per cluster. Throws
// InfeasibleError when a model exceeds its budget by more than `tol`.
double jcc_objective(const JccInstance& inst, const ClusterAssignment& a,
                     std::span<const LinearModel> models, double tol = 1e-9);

struct JccSolution {
  ClusterAssignment assignment;
  std::vector<LinearModel> models;
  double objective = 0.0;
  std::vector<double> per_cluster_objectives;
  double intra_penalty = 0.0;             // already weighted by intra_weight
  std::size_t assignments_evaluated = 0;
  std::vector<int> empty_clusters;        // clusters without positives (beta = 0 models)
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// Global optimum by enumeration. With a shared budget only canonical
// assignments are visited (labels in order of first appearance), otherwise
// all L^N+ assignments. Empty clusters are allowed. Per-subset SVMs are
// trained once and reused. Ties keep the lexicographically smallest
// assignment. Throws SizeError when L^N+ exceeds `cap`.
JccSolution solve_exact(const JccInstance& inst, std::size_t cap = kDefaultEnumerationCap);

// Rebuilds the binary-assignment (big-M) bookkeeping for a solution and
// compares it with the clustering bookkeeping.
struct MipEquivalenceReport {
  double jcc_objective = 0.0;
  double mip_objective = 0.0;
  double difference = 0.0;
  double big_m = 0.0;
  double max_unassigned_slack = 0.0;  // max xi_i^l over z_il = 0
  bool objectives_agree = false;      // |difference| <= 1e-8
  bool unassigned_slacks_zero = false;
  std::vector<int> empty_clusters;

  bool passed() const { return objectives_agree && unassigned_slacks_zero; }
};

MipEquivalenceReport verify_mip_equivalence(const JccInstance& inst, const JccSolution& solution);
// Solves the instance exactly first.
MipEquivalenceReport verify_mip_equivalence(const JccInstance& inst);

}  // namespace clustclass
