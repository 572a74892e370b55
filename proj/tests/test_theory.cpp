#include <doctest.h>

#include "clustclass/error.hpp"
#include "clustclass/theory.hpp"

#include <cmath>
#include <random>

using namespace clustclass;

namespace {

// Independent evaluation of the inequality in plain double arithmetic.
bool satisfies(double N, int Q, int D, double eps, double delta) {
  const double e = std::exp(1.0);
  return N >= 8.0 / (eps * eps) *
                  (std::log(2.0 / delta) + (Q + 1) * std::log(2 * e * N / (Q + 1)) + Q * std::log(e * D / Q));
}

}  // namespace

TEST_SUITE("theory") {

TEST_CASE("VC bound") {
  CHECK(vc_bound(2, 1) == doctest::Approx(12 * (1 + std::log(3.0))).epsilon(1e-14));
  CHECK(vc_bound(2, 1) == doctest::Approx(25.18).epsilon(1e-3));
  CHECK(vc_bound(3, 212) == doctest::Approx(4 * 3 * 213 * std::log(6 * std::exp(1.0))).epsilon(1e-14));
  CHECK(std::abs(vc_bound(3, 212) - 7135.7) < 0.05);
  CHECK(vc_bound(1, 9) == doctest::Approx(20.0).epsilon(1e-14));
  for (int L = 1; L < 5; ++L)
    for (int D = 1; D < 5; ++D) {
      CHECK(vc_bound(L + 1, D) > vc_bound(L, D));
      CHECK(vc_bound(L, D + 1) > vc_bound(L, D));
    }
}

TEST_CASE("minimal sample size") {
  const auto n = min_sample_size(1, 2, 0.5, 0.1);
  CHECK(n == 627);
  CHECK(satisfies(static_cast<double>(n), 1, 2, 0.5, 0.1));
  CHECK_FALSE(satisfies(static_cast<double>(n - 1), 1, 2, 0.5, 0.1));

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dd(1, 300);
  std::uniform_real_distribution<double> ee(0.02, 0.9), dl(0.001, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int D = dd(rng);
    const int Q = std::uniform_int_distribution<int>(1, D)(rng);
    const double eps = ee(rng), delta = dl(rng);
    const auto m = min_sample_size(Q, D, eps, delta);
    CHECK(satisfies(static_cast<double>(m), Q, D, eps, delta));
    CHECK_FALSE(satisfies(static_cast<double>(m - 1), Q, D, eps, delta));
  }

  CHECK(min_sample_size(5, 5, 0.05, 0.1) > 4 * min_sample_size(5, 5, 0.1, 0.1));
  CHECK(min_sample_size(2, 100, 0.1, 0.1) > min_sample_size(2, 10, 0.1, 0.1));
  CHECK_THROWS_AS(min_sample_size(3, 2, 0.1, 0.1), ArgumentError);
  CHECK_THROWS_AS(min_sample_size(1, 1, 1e-9, 0.1), RangeError);
}

TEST_CASE("generalization gap") {
  const double v = 25.18;
  const double expected =
      2 * std::sqrt(2 * (v * std::log(2 * std::exp(1.0) * 1e5 / v) + std::log(40.0)) / 1e5);
  CHECK(generalization_gap(1e5, v, 0.05) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(generalization_gap(1e9, v, 0.05) < generalization_gap(1e6, v, 0.05));
  CHECK(generalization_gap(1e12, v, 0.05) < 1e-3);
  CHECK(generalization_gap(1e5, 2 * v, 0.05) > generalization_gap(1e5, v, 0.05));
}

}
