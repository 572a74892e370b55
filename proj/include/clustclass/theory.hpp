#pragma once

#include <cstdint>

namespace clustclass {

// Right-hand side of the sparse-SVM sample-complexity inequality
//   N >= (8/eps^2) [log(2/delta) + (Q+1) log(2eN/(Q+1)) + Q log(eD/Q)].
double sample_size_rhs(double N, int Q, int D, double epsilon, double delta);

// Smallest N satisfying the inequality. Only N >= Q+1 is considered, where
// the growth-function bound behind it holds. Throws RangeError when no N fits
// below 2^63-1.
std::int64_t min_sample_size(int Q, int D, double epsilon, double delta);

// (L+1) L (D+1) log(e (L+1) L / 2)
double vc_bound(int L, int D);

// 2 sqrt(2 (V log(2eN/V) + log(2/rho)) / N)
double generalization_gap(double N, double V, double rho);

}  // namespace clustclass
