#include <doctest.h>

#include "clustclass/error.hpp"
#include "clustclass/klrt.hpp"

#include <cmath>
#include <random>

using namespace clustclass;

namespace {

QuantizedDataset make_q(const std::vector<std::vector<int>>& rows, std::vector<int> labels, std::vector<int> counts) {
  QuantizedDataset q;
  q.levels.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < counts.size(); ++j)
      q.levels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  q.labels = std::move(labels);
  q.level_counts = std::move(counts);
  return q;
}

// Brute-force naive-Bayes log-likelihood ratio of one row from raw counts.
double naive_bayes(const QuantizedDataset& train, const std::vector<int>& row, double smoothing) {
  double total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    double cp = 0, cn = 0, np = 0, nn = 0;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      const bool pos = train.labels[i] == 1;
      (pos ? np : nn) += 1;
      if (train.levels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == row[j]) (pos ? cp : cn) += 1;
    }
    const double v = train.level_counts[j];
    total += std::log((cp + smoothing) / (np + smoothing * v)) - std::log((cn + smoothing) / (nn + smoothing * v));
  }
  return total;
}

}  // namespace

TEST_SUITE("klrt") {

TEST_CASE("empirical pmfs") {
  const auto q = make_q({{0}, {0}, {1}, {1}}, {1, 1, 1, -1}, {2});
  const auto m0 = fit_lrt(q, 0.0);
  CHECK(m0.pmf[0][0][0] == doctest::Approx(2.0 / 3));
  CHECK(m0.pmf[0][0][1] == doctest::Approx(1.0 / 3));
  CHECK(m0.pmf[0][1][0] == 0.0);
  const auto m1 = fit_lrt(q, 1.0);
  CHECK(m1.pmf[0][0][0] == doctest::Approx(3.0 / 5));
  CHECK(m1.pmf[0][0][1] == doctest::Approx(2.0 / 5));
  CHECK(std::isinf(m0.log_ratio(0, 0)));
  CHECK(m0.log_ratio(0, 0) > 0);
  CHECK_THROWS_AS(fit_lrt(make_q({{0}}, {1}, {2})), FitError);
}

TEST_CASE("zero over zero is a zero log-ratio") {
  const auto q = make_q({{0}, {0}}, {1, -1}, {3});
  const auto m = fit_lrt(q, 0.0);
  CHECK(m.log_ratio(0, 2) == 0.0);
}

TEST_CASE("pmfs sum to one") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> lv(0, 3);
  std::vector<std::vector<int>> rows;
  std::vector<int> y;
  for (int i = 0; i < 50; ++i) {
    rows.push_back({lv(rng), lv(rng), lv(rng) % 2});
    y.push_back(i % 4 == 0 ? 1 : -1);
  }
  const auto m = fit_lrt(make_q(rows, y, {4, 4, 2}), 1.0);
  for (const auto& f : m.pmf)
    for (const auto& c : f) {
      double s = 0;
      for (double p : c) {
        s += p;
        CHECK(p > 0.0);
      }
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
}

TEST_CASE("top-K selection") {
  // Three binary features whose log-ratios at level 1 are 2.0, -1.0, 0.5.
  LrtModel m;
  auto feature = [](double lr) {
    std::array<std::vector<double>, 2> t;
    t[0] = {0.5, 0.5};
    t[1] = {0.5, 0.5 / std::exp(lr)};
    return t;
  };
  m.pmf = {feature(2.0), feature(-1.0), feature(0.5)};
  const std::vector<int> row{1, 1, 1};
  const auto s = score_klrt(m, row, 2);
  CHECK(s.score == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(s.top_features == std::vector<std::size_t>{0, 2});
  CHECK(score_klrt(m, row, 3).score == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(score_klrt(m, row, 0), ArgumentError);
  CHECK_THROWS_AS(score_klrt(m, row, 4), ArgumentError);

  const std::vector<int> zero_row{0, 0, 0};
  const auto tie = score_klrt(m, zero_row, 2);
  CHECK(tie.top_features == std::vector<std::size_t>{0, 1});
}

TEST_CASE("K = D equals the brute-force naive Bayes ratio and top sets nest") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> lv(0, 2);
  std::vector<std::vector<int>> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({lv(rng), lv(rng), lv(rng), lv(rng), lv(rng)});
    y.push_back(i % 3 == 0 ? 1 : -1);
  }
  const auto q = make_q(rows, y, {3, 3, 3, 3, 3});
  const auto m = fit_lrt(q, 1.0);
  for (const auto& row : rows) {
    CHECK(std::abs(score_klrt(m, row, 5).score - naive_bayes(q, row, 1.0)) < 1e-10);
    for (std::size_t k = 1; k < 5; ++k) {
      const auto a = score_klrt(m, row, k).top_features, b = score_klrt(m, row, k + 1).top_features;
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
  }
}

TEST_CASE("feature importance") {
  // Feature 0 is strongly indicative; features 1 and 2 are exact copies of
  // each other and carry no signal.
  std::vector<std::vector<int>> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2 ? 1 : -1;
    const int noise = (i / 2) % 2;
    rows.push_back({label == 1 ? 1 : 0, noise, noise});
    y.push_back(label);
  }
  const auto q = make_q(rows, y, {2, 2, 2});
  const auto imp = feature_importance(fit_lrt(q, 1.0), q);
  REQUIRE(imp.size() == 3);
  CHECK(imp[0].feature == 0);
  // Copies share their likelihood ratios; top-1 ties go to the lower index.
  CHECK(imp[1].mean_ratio == doctest::Approx(imp[2].mean_ratio).epsilon(1e-12));
  CHECK(imp[0].score >= imp[1].score);
  CHECK(imp[1].top_count + imp[2].top_count + imp[0].top_count == 40);
}

}
