#include "clustclass/theory.hpp"

#include "clustclass/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace clustclass {

namespace {

void check_inputs(int Q, int D, double epsilon, double delta) {
  if (D < 1) throw ArgumentError("D must be at least 1");
  if (Q < 1 || Q > D) throw ArgumentError("Q must lie in [1, D]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
}

long double rhs(long double N, int Q, int D, double epsilon, double delta) {
  const long double e = std::numbers::e_v<long double>;
  const long double q = Q;
  const long double eps = epsilon;
  return 8.0L / (eps * eps) *
         (std::log(2.0L / delta) + (q + 1) * std::log(2.0L * e * N / (q + 1)) + q * std::log(e * D / q));
}

bool passes(std::int64_t N, int Q, int D, double epsilon, double delta) {
  return static_cast<long double>(N) >= rhs(static_cast<long double>(N), Q, D, epsilon, delta);
}

}  // namespace

double sample_size_rhs(double N, int Q, int D, double epsilon, double delta) {
  check_inputs(Q, D, epsilon, delta);
  if (!(N > 0.0)) throw ArgumentError("N must be positive");
  return static_cast<double>(rhs(N, Q, D, epsilon, delta));
}

std::int64_t min_sample_size(int Q, int D, double epsilon, double delta) {
  check_inputs(Q, D, epsilon, delta);
  // N - rhs(N) is increasing once N >= 8(Q+1)/eps^2, so start there and bisect.
  const long double floor_n = std::max<long double>(Q + 1, std::ceil(8.0L * (Q + 1) / (static_cast<long double>(epsilon) * epsilon)));
  constexpr std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  if (floor_n >= static_cast<long double>(cap)) throw RangeError("sample size exceeds 2^63-1");
  std::int64_t lo = static_cast<std::int64_t>(floor_n);
  if (passes(lo, Q, D, epsilon, delta)) return lo;
  std::int64_t hi = lo;
  while (!passes(hi, Q, D, epsilon, delta)) {
    if (hi > cap / 2) {
      if (passes(cap, Q, D, epsilon, delta)) {
        hi = cap;
        break;
      }
      throw RangeError("no sample size below 2^63-1 satisfies the bound");
    }
    lo = hi;
    hi *= 2;
  }
  // passes(hi) and !passes(lo)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (passes(mid, Q, D, epsilon, delta)) hi = mid;
    else lo = mid;
  }
  return hi;
}

double vc_bound(int L, int D) {
  if (L < 1) throw ArgumentError("L must be at least 1");
  if (D < 1) throw ArgumentError("D must be at least 1");
  const double l = L;
  return (l + 1) * l * (D + 1.0) * std::log(std::numbers::e * (l + 1) * l / 2.0);
}

double generalization_gap(double N, double V, double rho) {
  if (!(N > 0.0)) throw ArgumentError("N must be positive");
  if (!(V > 0.0)) throw ArgumentError("V must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("rho must lie in (0, 1)");
  return 2.0 * std::sqrt(2.0 * (V * std::log(2.0 * std::numbers::e * N / V) + std::log(2.0 / rho)) / N);
}

}  // namespace clustclass
