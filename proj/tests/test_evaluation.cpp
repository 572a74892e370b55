#include <doctest.h>

#include "clustclass/error.hpp"
#include "clustclass/evaluation.hpp"
#include "clustclass/slsvm.hpp"
#include "oracles.hpp"

#include <random>

using namespace clustclass;

TEST_SUITE("evaluation") {

TEST_CASE("reference AUC values") {
  const std::vector<double> s{0.9, 0.8, 0.4, 0.3};
  const std::vector<int> y{1, -1, 1, -1};
  CHECK(auc(s, y) == 0.75);
  const std::vector<double> perfect{3, 2, 1, 0};
  CHECK(auc(perfect, std::vector<int>{1, 1, -1, -1}) == 1.0);
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK(auc(flat, y) == 0.5);
}

TEST_CASE("curve shape") {
  const std::vector<double> s{0.9, 0.8, 0.4, 0.3};
  const std::vector<int> y{1, -1, 1, -1};
  const auto roc = roc_curve(s, y);
  REQUIRE(roc.points.size() == 5);
  CHECK(roc.points.front().false_alarm_rate == 0.0);
  CHECK(roc.points.front().detection_rate == 0.0);
  CHECK(roc.points.back().false_alarm_rate == 1.0);
  CHECK(roc.points.back().detection_rate == 1.0);
  for (std::size_t i = 1; i < roc.points.size(); ++i)
    CHECK(roc.points[i].false_alarm_rate >= roc.points[i - 1].false_alarm_rate);
  CHECK(roc.points[1].threshold == doctest::Approx(0.85));
  CHECK(roc_csv(roc).rfind("threshold,far,dr\n", 0) == 0);
}

TEST_CASE("trapezoid area equals the pairwise statistic") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial * 3;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i % 3 == 0 ? 1 : -1;
      s[i] = g(rng) + 0.5 * y[i];
    }
    CHECK(std::abs(auc(s, y) - oracle::pairwise_auc(s, y)) <= 1e-12);
    // with ties
    for (auto& v : s) v = std::round(v);
    CHECK(std::abs(auc(s, y) - oracle::pairwise_auc(s, y)) <= 1e-12);
  }
}

TEST_CASE("strictly increasing transforms keep the curve") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  std::vector<double> s(30), t(30);
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = i % 2 ? 1 : -1;
    s[i] = g(rng);
    t[i] = std::exp(3 * s[i]) + 7;
  }
  const auto a = roc_curve(s, y), b = roc_curve(t, y);
  CHECK(a.auc == b.auc);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].false_alarm_rate == b.points[i].false_alarm_rate);
    CHECK(a.points[i].detection_rate == b.points[i].detection_rate);
  }
}

TEST_CASE("metric errors") {
  const std::vector<double> s{1, 2};
  CHECK_THROWS_AS(roc_curve(s, std::vector<int>{1, 1}), MetricError);
  CHECK_THROWS_AS(roc_curve(s, std::vector<int>{1}), MetricError);
  CHECK_THROWS_AS(confusion_metrics(std::vector<int>{1}, std::vector<int>{1, -1}), MetricError);
}

TEST_CASE("confusion metrics") {
  // TP=3, FN=1, FP=2, TN=4
  const std::vector<int> y{1, 1, 1, 1, -1, -1, -1, -1, -1, -1};
  const std::vector<int> p{1, 1, 1, -1, 1, 1, -1, -1, -1, -1};
  const auto m = confusion_metrics(p, y);
  CHECK(m.tp == 3);
  CHECK(m.fn == 1);
  CHECK(m.fp == 2);
  CHECK(m.tn == 4);
  CHECK(m.detection_rate == 0.75);
  CHECK(m.false_alarm_rate == doctest::Approx(1.0 / 3));
  CHECK(m.precision == 0.6);
  CHECK(m.detection_rate * (m.tp + m.fn) == m.tp);
  const auto all = confusion_metrics(y, y);
  CHECK(all.detection_rate == 1.0);
  CHECK(all.false_alarm_rate == 0.0);
  std::vector<int> flipped;
  for (int v : y) flipped.push_back(-v);
  const auto bad = confusion_metrics(flipped, y);
  CHECK(bad.detection_rate == 0.0);
  CHECK(bad.false_alarm_rate == 1.0);
}

TEST_CASE("cross-validation") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  Matrix x(60, 2);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    y[i] = i % 4 == 0 ? 1 : -1;
    x(i, 0) = g(rng) + y[i];
    x(i, 1) = g(rng);
  }
  const auto d = make_dataset(x, y);
  const auto folds = stratified_folds(d.labels, 5, 1);
  for (std::size_t f = 0; f < 5; ++f) {
    int pos = 0, neg = 0;
    for (int i = 0; i < 60; ++i)
      if (folds[i] == f) (y[i] == 1 ? pos : neg)++;
    CHECK(pos == 3);
    CHECK(neg == 9);
  }

  const Trainer svm = [](const Dataset& tr, const Dataset& va, const ParamCell& c) {
    const auto m = train_penalized(tr, {c.at("C"), 0.0}).model;
    std::vector<double> s;
    for (std::size_t i = 0; i < va.rows(); ++i) s.push_back(decision_value(m, va.features.row(i).transpose()));
    return s;
  };
  const auto grid = expand_grid({{"C", {0.3, 1, 3}}});
  const auto r = cross_validate(d, svm, grid, 5, 2);
  CHECK(r.mean_auc.size() == 3);
  CHECK(r.mean_auc[r.best] == *std::max_element(r.mean_auc.begin(), r.mean_auc.end()));

  const Trainer constant = [](const Dataset&, const Dataset& va, const ParamCell&) {
    return std::vector<double>(va.rows(), 0.0);
  };
  const auto tie = cross_validate(d, constant, expand_grid({{"a", {1, 2, 3}}}), 3, 0);
  CHECK(tie.best == 0);
  const auto single = cross_validate(d, constant, expand_grid({{"a", {7}}}), 3, 0);
  CHECK(single.best_cell().at("a") == 7);

  CHECK(expand_grid({{"a", {1, 2}}, {"b", {3, 4, 5}}}).size() == 6);
  const auto few = make_dataset(Matrix::Zero(6, 1), {1, -1, -1, -1, -1, -1});
  CHECK_THROWS_AS(cross_validate(few, constant, grid, 2, 0), StratificationError);
}

}
