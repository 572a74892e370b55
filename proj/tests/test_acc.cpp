#include <doctest.h>

#include "clustclass/acc.hpp"
#include "clustclass/error.hpp"
#include "clustclass/jcc.hpp"
#include "clustclass/kmeans.hpp"
#include "clustclass/synth.hpp"

#include <random>

using namespace clustclass;

namespace {

PlantedData planted(std::uint64_t seed, double separation = 8.0) {
  SynthConfig c;
  c.D = 6;
  c.L_true = 2;
  c.support_size = 2;
  c.N = 300;
  c.positive_ratio = 0.3;
  c.separation = separation;
  c.seed = seed;
  return generate_planted(c);
}

AccConfig config(int L, std::uint64_t seed) {
  AccConfig cfg;
  cfg.L = L;
  cfg.params = {1.0, 1.0, 4.0};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("acc") {

TEST_CASE("objective trace never increases and stops early") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto p = planted(seed, 3.0);
    for (int L = 1; L <= 3; ++L) {
      const auto m = acc_train(p.data, config(L, seed), all_features(6));
      for (std::size_t t = 1; t < m.trace.size(); ++t) CHECK(m.trace[t] <= m.trace[t - 1] + 1e-9);
      CHECK(m.converged);
      CHECK(m.trace.size() < 100);
    }
  }
}

TEST_CASE("one cluster equals a single budgeted SVM") {
  const auto p = planted(1);
  const auto m = acc_train(p.data, config(1, 0), all_features(6));
  REQUIRE(m.trace.size() == 1);
  const auto direct = train_constrained(p.data.class_rows(1), p.data.class_rows(-1), {1, 1, 4});
  CHECK(m.objective() == doctest::Approx(direct.objective).epsilon(1e-8));
}

TEST_CASE("ground-truth start converges at once with zero positive slacks") {
  const auto p = planted(2, 12.0);
  auto cfg = config(2, 0);
  cfg.init = AccInit::kGiven;
  cfg.initial_assignment = p.assignment;
  cfg.params.T = 50.0;
  cfg.params.lambda_plus = 10.0;
  cfg.params.lambda_minus = 10.0;
  const auto m = acc_train(p.data, cfg, all_features(6));
  CHECK(m.final_assignment == p.assignment);
  CHECK(m.trace.size() == 1);
  const Matrix pos = p.data.class_rows(1);
  for (Eigen::Index i = 0; i < pos.rows(); ++i)
    CHECK(decision_value(m.models[p.assignment[i]], pos.row(i).transpose()) >= 1.0 - 1e-6);
}

TEST_CASE("deterministic for a fixed seed") {
  const auto p = planted(3, 4.0);
  const auto a = acc_train(p.data, config(2, 42), all_features(6));
  const auto b = acc_train(p.data, config(2, 42), all_features(6));
  CHECK(a.trace == b.trace);
  CHECK(a.final_assignment == b.final_assignment);
  CHECK(a.models[0].beta == b.models[0].beta);
}

TEST_CASE("re-clustering rule") {
  Matrix pos(1, 2);
  pos << 1, 1;
  std::vector<LinearModel> models{{Vector(2), 0.0}, {Vector(2), 0.0}};
  models[0].beta << 2, 0;
  models[1].beta << 0, 5;
  // Projections 2 and 5; decision values 2 and 5: moves.
  CHECK(recluster(pos, models, all_features(2), {0}) == ClusterAssignment{1});
  // Offsets in conflict with projections: stays.
  models[1].beta0 = -10.0;
  CHECK(recluster(pos, models, all_features(2), {0}) == ClusterAssignment{0});
  // L = 1 never changes.
  std::vector<LinearModel> one{models[0]};
  CHECK(recluster(pos, one, all_features(2), {0}) == ClusterAssignment{0});
}

TEST_CASE("committed moves satisfy the decision-value constraint") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Matrix pos(30, 3);
  for (Eigen::Index i = 0; i < pos.size(); ++i) pos.data()[i] = g(rng);
  std::vector<LinearModel> models(3, LinearModel{Vector(3), 0.0});
  for (auto& m : models) {
    for (int j = 0; j < 3; ++j) m.beta(j) = g(rng);
    m.beta0 = g(rng);
  }
  ClusterAssignment cur(30);
  for (int i = 0; i < 30; ++i) cur[i] = i % 3;
  const std::vector<std::size_t> routing{0, 2};
  const auto next = recluster(pos, models, routing, cur);
  for (int i = 0; i < 30; ++i) {
    const Vector x = pos.row(i).transpose();
    if (next[i] != cur[i]) CHECK(decision_value(models[next[i]], x) >= decision_value(models[cur[i]], x));
  }
}

TEST_CASE("prediction routing") {
  AccModel m;
  m.L = 2;
  m.models = {{Vector(2), 0.5}, {Vector(2), -0.5}};
  m.models[0].beta << 1, 0;
  m.models[1].beta << 0, 1;
  m.cluster_features = {0, 1};
  Vector x(2);
  x << 0.2, 3.0;
  auto p = acc_predict(m, x);
  CHECK(p.cluster == 1);
  CHECK(p.decision_value == doctest::Approx(2.5));
  CHECK(p.label == 1);
  x << 1.0, 1.0;
  CHECK(acc_predict(m, x).cluster == 0);
  CHECK_THROWS_AS(acc_predict(m, Vector::Zero(3)), ArgumentError);
}

TEST_CASE("planted blobs route to their own cluster") {
  const auto p = planted(5, 10.0);
  const auto m = acc_train(p.data, config(2, 1), all_features(6));
  const Matrix pos = p.data.class_rows(1);
  std::size_t agree = 0;
  for (Eigen::Index i = 0; i < pos.rows(); ++i) agree += acc_predict(m, pos.row(i).transpose()).cluster == m.final_assignment[i];
  CHECK(agree >= static_cast<std::size_t>(0.95 * pos.rows()));
}

TEST_CASE("never better than the exact optimum; never worse than its k-means start") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    JccInstance inst;
    inst.positives.resize(6, 2);
    inst.negatives.resize(5, 2);
    for (Eigen::Index i = 0; i < inst.positives.size(); ++i) inst.positives.data()[i] = g(rng) + 1.0;
    for (Eigen::Index i = 0; i < inst.negatives.size(); ++i) inst.negatives.data()[i] = g(rng) - 1.0;
    inst.L = 2;
    inst.params = {1, 1, 1.0};
    const auto exact = solve_exact(inst);
    auto acc_cfg = config(2, trial);
    acc_cfg.params = inst.params;
    const auto acc = acc_train(inst.positives, inst.negatives, acc_cfg, all_features(2));
    CHECK(acc.objective() >= exact.objective - 1e-9);

    const auto ct = ct_baseline(inst.positives, inst.negatives, 2, true, inst.params, trial, all_features(2));
    auto cfg = config(2, 0);
    cfg.params = inst.params;
    cfg.init = AccInit::kGiven;
    cfg.initial_assignment = ct.final_assignment;
    const auto from_ct = acc_train(inst.positives, inst.negatives, cfg, all_features(2));
    CHECK(from_ct.objective() <= jcc_objective(inst, ct.final_assignment, ct.models) + 1e-9);
  }
}

TEST_CASE("k-means baseline") {
  Matrix pos(8, 2);
  pos << 0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1, 10, 10, 10.1, 10, 10, 10.1, 10.1, 10.1;
  Matrix neg(3, 2);
  neg << -5, -5, -6, -5, -5, -6;
  const auto km = kmeans(pos, 2, 3);
  for (int i = 1; i < 4; ++i) CHECK(km.assignment[i] == km.assignment[0]);
  for (int i = 5; i < 8; ++i) CHECK(km.assignment[i] == km.assignment[4]);
  CHECK(km.assignment[0] != km.assignment[4]);

  const auto ct1 = ct_baseline(pos, neg, 1, false, {1, 1, 1.0}, 0, all_features(2));
  const auto svm = train_constrained(pos, neg, {1, 1, std::numeric_limits<double>::infinity()});
  CHECK(ct1.objective() == doctest::Approx(svm.objective).epsilon(1e-8));
}

TEST_CASE("routing feature selection") {
  Matrix x(6, 3);
  x << 1, 0, 5, 2, 0, 5, 3, 0, 5, 4, 0, 5, 5, 0, 5, 6, 0, 5;
  const auto d = make_dataset(x, {-1, -1, -1, 1, 1, 1});
  CHECK(select_cluster_features(d) == std::vector<std::size_t>{0});
  const auto flat = make_dataset(Matrix::Ones(4, 2), {1, -1, 1, -1});
  CHECK(select_cluster_features(flat) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("argument errors") {
  const auto p = planted(7);
  CHECK_THROWS_AS(acc_train(p.data.class_rows(1).topRows(1), p.data.class_rows(-1), config(2, 0), all_features(6)),
                  ArgumentError);
  CHECK_THROWS_AS(acc_train(p.data, config(0, 0), all_features(6)), ArgumentError);
}

}
