#include "clustclass/acc.hpp"
#include "clustclass/archive.hpp"
#include "clustclass/cohort.hpp"
#include "clustclass/error.hpp"
#include "clustclass/evaluation.hpp"
#include "clustclass/jcc.hpp"
#include "clustclass/parallel.hpp"
#include "clustclass/pipeline.hpp"
#include "clustclass/synth.hpp"
#include "clustclass/theory.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace cc = clustclass;

namespace {

struct ModelFlags {
  std::string model = "slsvm";
  int L = 2;
  std::optional<double> T;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
  double C = 1.0;
  double rho = 0.0;
  double lambda = 1.0;
  std::size_t K = cc::kDefaultLrtK;
  double smoothing = 1.0;
  std::size_t restarts = 5;
  std::size_t max_iters = 100;
  std::string init = "random";
  std::string scheme;
  bool no_standardize = false;
  bool all_cluster_features = false;
  bool dense = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool single_model) {
  if (single_model)
    cmd->add_option("--model", f.model, "slsvm | logreg | klrt | acc | ct_baseline")->capture_default_str();
  cmd->add_option("--L", f.L, "number of clusters (acc, ct_baseline)")->capture_default_str();
  cmd->add_option("--T", f.T, "l1 budget; for slsvm selects the budgeted form");
  cmd->add_option("--lambda-plus", f.lambda_plus, "positive-sample slack weight")->capture_default_str();
  cmd->add_option("--lambda-minus", f.lambda_minus, "negative-sample slack weight")->capture_default_str();
  cmd->add_option("--C", f.C, "slack weight of the penalized slsvm")->capture_default_str();
  cmd->add_option("--rho", f.rho, "l1 weight of the penalized slsvm")->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "l1 weight of logreg")->capture_default_str();
  cmd->add_option("--K", f.K, "number of ratios kept by klrt")->capture_default_str();
  cmd->add_option("--smoothing", f.smoothing, "additive smoothing of klrt counts")->capture_default_str();
  cmd->add_option("--restarts", f.restarts, "acc random restarts")->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "acc alternation cap")->capture_default_str();
  cmd->add_option("--init", f.init, "acc initialization: random | kmeans")->capture_default_str();
  cmd->add_option("--scheme", f.scheme, "quantization scheme file for klrt");
  cmd->add_flag("--no-standardize", f.no_standardize, "train linear models on raw features");
  cmd->add_flag("--all-cluster-features", f.all_cluster_features, "route clusters on every feature");
  cmd->add_flag("--dense", f.dense, "ct_baseline without the l1 budget");
}

cc::TrainSpec make_spec(const ModelFlags& f, const std::string& model, std::uint64_t seed) {
  cc::TrainSpec s;
  s.kind = cc::parse_model_kind(model);
  s.T = f.T;
  s.lambda_plus = f.lambda_plus;
  s.lambda_minus = f.lambda_minus;
  s.C = f.C;
  s.rho = f.rho;
  s.lambda = f.lambda;
  s.K = f.K;
  s.smoothing = f.smoothing;
  s.L = f.L;
  s.seed = seed;
  s.standardize = !f.no_standardize;
  s.sparse = !f.dense;
  s.restarts = f.restarts;
  s.max_iters = f.max_iters;
  if (f.init == "random") s.init = cc::AccInit::kRandom;
  else if (f.init == "kmeans") s.init = cc::AccInit::kKMeans;
  else throw cc::ArgumentError("--init must be random or kmeans, got '" + f.init + "'");
  s.all_cluster_features = f.all_cluster_features;
  if (!f.scheme.empty()) s.scheme = cc::QuantizationScheme::load(f.scheme);
  return s;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw cc::IoError("cannot write " + path);
  file.precision(17);
  return file;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

bool clustered(cc::ModelKind k) { return k == cc::ModelKind::kAcc || k == cc::ModelKind::kCtBaseline; }

// ---------------------------------------------------------------------------

int run_synth(const cc::SynthConfig& cfg, const std::string& noise, const std::string& out, const std::string& truth) {
  cc::SynthConfig c = cfg;
  if (noise == "gaussian") c.noise = cc::SynthNoise::kGaussian;
  else if (noise == "poisson") c.noise = cc::SynthNoise::kPoisson;
  else throw cc::ArgumentError("--noise must be gaussian or poisson, got '" + noise + "'");
  const auto planted = cc::generate_planted(c);
  cc::write_csv(planted.data, out);
  if (!truth.empty()) {
    std::ofstream f(truth);
    if (!f) throw cc::IoError("cannot write " + truth);
    f << "row,cluster\n";
    for (std::size_t i = 0; i < planted.assignment.size(); ++i) f << i << ',' << planted.assignment[i] + 1 << '\n';
  }
  std::cout << "wrote " << planted.data.rows() << " rows (" << planted.data.count_label(1) << " positive) to " << out
            << '\n';
  for (std::size_t l = 0; l < planted.supports.size(); ++l) {
    std::cout << "cluster " << l + 1 << " support:";
    for (auto a : planted.supports[l]) std::cout << ' ' << planted.data.feature_names[a];
    std::cout << '\n';
  }
  return 0;
}

void print_summary(const cc::ModelArchive& m, std::size_t n_train) {
  std::cout << "model " << cc::to_string(m.kind) << ", " << m.dim() << " features, " << n_train << " training rows\n";
  switch (m.kind) {
    case cc::ModelKind::kSlsvm:
      std::cout << "nonzero weights " << m.linear.nonzero_count() << ", |beta|_1 " << m.linear.l1_norm() << '\n';
      break;
    case cc::ModelKind::kLogreg:
      std::cout << "nonzero weights " << (m.logistic.theta.array().abs() > cc::kSparsityEpsilon).count() << '\n';
      break;
    case cc::ModelKind::kKlrt: std::cout << "K " << m.K << '\n'; break;
    case cc::ModelKind::kAcc:
    case cc::ModelKind::kCtBaseline: {
      std::cout << "clusters " << m.acc.L << ", routing features " << m.acc.cluster_features.size() << ", cycles "
                << m.acc.trace.size() << ", Z " << m.acc.objective() << '\n';
      for (std::size_t l = 0; l < m.acc.models.size(); ++l) {
        const auto n = std::count(m.acc.final_assignment.begin(), m.acc.final_assignment.end(), static_cast<int>(l));
        std::cout << "  cluster " << l + 1 << ": " << n << " positives, " << m.acc.models[l].nonzero_count()
                  << " nonzero weights\n";
      }
      const double v = cc::vc_bound(m.acc.L, static_cast<int>(m.dim()));
      std::cout << "V_ACC " << v << ", generalization gap (rho=0.05) "
                << cc::generalization_gap(static_cast<double>(n_train), v, 0.05) << '\n';
      break;
    }
  }
}

int run_train(const std::string& input, const std::string& label, const ModelFlags& f, std::uint64_t seed,
              const std::string& out) {
  const auto data = cc::load_csv(input, label);
  const auto archive = cc::fit_model(data, make_spec(f, f.model, seed));
  cc::save_archive(archive, out);
  print_summary(archive, data.rows());
  std::cout << "saved " << out << '\n';
  return 0;
}

int run_predict(const std::string& archive_path, const std::string& input, const std::string& label,
                const std::string& out) {
  const auto archive = cc::load_archive(archive_path);
  bool has_labels = false;
  const auto data = cc::load_csv_optional_label(input, label, has_labels);
  if (data.feature_names != archive.feature_names)
    throw cc::SchemaError("input columns do not match the archive's feature names");
  const auto preds = cc::predict(archive, data.features);
  std::ofstream file;
  auto& os = open_out(out, file);
  os.precision(17);
  os << "row,cluster,score,label\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    os << i << ',';
    if (preds[i].cluster >= 0) os << preds[i].cluster + 1;
    os << ',' << preds[i].score << ',' << preds[i].label << '\n';
  }
  if (has_labels && data.count_label(1) > 0 && data.count_label(-1) > 0) {
    std::vector<double> scores;
    for (const auto& p : preds) scores.push_back(p.score);
    std::cerr << "auc " << cc::auc(scores, data.labels) << '\n';
  }
  return 0;
}

int run_evaluate(const std::string& input, const std::string& label, const ModelFlags& f,
                 const std::vector<std::string>& models, std::uint64_t seed, std::size_t repeats, double fraction,
                 const std::string& out, const std::string& roc_dir) {
  if (repeats < 1) throw cc::ArgumentError("--repeats must be at least 1");
  const auto data = cc::load_csv(input, label);
  std::vector<cc::TrainSpec> specs;
  for (const auto& m : models) specs.push_back(make_spec(f, m, seed));

  std::vector<std::vector<double>> aucs(specs.size(), std::vector<double>(repeats));
  std::vector<std::size_t> n_train(repeats);
  cc::parallel_for(repeats, [&](std::size_t r) {
    const auto [train, test] = cc::split_train_test(data, fraction, seed + r);
    n_train[r] = train.rows();
    for (std::size_t k = 0; k < specs.size(); ++k) {
      cc::TrainSpec s = specs[k];
      s.seed = seed + r;
      const auto archive = cc::fit_model(train, s);
      const auto scores = cc::predict_scores(archive, test.features);
      const auto roc = cc::roc_curve(scores, test.labels);
      aucs[k][r] = roc.auc;
      if (!roc_dir.empty())
        cc::write_roc_csv(roc, std::filesystem::path(roc_dir) /
                                   (models[k] + "_seed" + std::to_string(seed + r) + ".csv"));
    }
  });

  std::ofstream file;
  auto& os = open_out(out, file);
  os << "model,repeats,mean_auc,std_auc,v_acc,gap\n";
  os.precision(6);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    os << models[k] << ',' << repeats << ',' << std::fixed << mean(aucs[k]) << ',' << sample_sd(aucs[k]) << ',';
    if (clustered(specs[k].kind)) {
      const double v = cc::vc_bound(specs[k].L, static_cast<int>(data.cols()));
      os << v << ',' << cc::generalization_gap(static_cast<double>(n_train[0]), v, 0.05);
    } else {
      os << ',';
    }
    os << '\n';
    os.unsetf(std::ios::floatfield);
  }
  return 0;
}

int run_oracle(const std::string& input, const std::string& label, const ModelFlags& f, std::uint64_t seed,
               std::size_t cap) {
  cc::JccInstance inst;
  if (input.size() > 4 && input.substr(input.size() - 4) == ".csv") {
    const auto data = cc::load_csv(input, label);
    inst.positives = data.class_rows(1);
    inst.negatives = data.class_rows(-1);
    inst.L = f.L;
    inst.params = {f.lambda_plus, f.lambda_minus, f.T.value_or(std::numeric_limits<double>::infinity())};
    inst.validate();
  } else {
    inst = cc::load_jcc_instance(input);
  }
  const auto exact = cc::solve_exact(inst, cap);
  const auto mip = cc::verify_mip_equivalence(inst, exact);

  std::cout.precision(12);
  std::cout << "exact Z " << exact.objective << " (" << exact.assignments_evaluated << " assignments)\n";
  std::cout << "exact assignment";
  for (int c : exact.assignment) std::cout << ' ' << c + 1;
  std::cout << '\n';
  std::cout << "mip objective " << mip.mip_objective << ", difference " << mip.difference << ", "
            << (mip.passed() ? "equivalent" : "NOT equivalent") << '\n';

  if (inst.shared_budget() && inst.intra_weight == 0.0 && inst.positives.rows() >= inst.L) {
    cc::AccConfig cfg;
    cfg.L = inst.L;
    cfg.params = inst.params;
    cfg.seed = seed;
    cfg.restarts = f.restarts;
    cfg.max_iters = f.max_iters;
    const auto features = cc::all_features(static_cast<std::size_t>(inst.positives.cols()));
    const auto acc = cc::acc_train(inst.positives, inst.negatives, cfg, features);
    const double gap = (acc.objective() - exact.objective) / std::max(1.0, std::abs(exact.objective));
    std::cout << "acc Z " << acc.objective() << ", relative gap " << gap << '\n';
    std::cout << "acc assignment";
    for (int c : acc.final_assignment) std::cout << ' ' << c + 1;
    std::cout << '\n';
  } else {
    std::cout << "acc skipped: needs a shared budget, no intra-cluster penalty and L <= N+\n";
  }
  return mip.passed() ? 0 : 3;
}

int run_theory(int L, int D, std::optional<int> Q, double eps, double delta, std::optional<double> N, double rho) {
  std::cout.precision(10);
  const double v = cc::vc_bound(L, D);
  std::cout << "V_ACC(L=" << L << ", D=" << D << ") = " << v << '\n';
  if (Q) std::cout << "min sample size (Q=" << *Q << ", eps=" << eps << ", delta=" << delta
                   << ") = " << cc::min_sample_size(*Q, D, eps, delta) << '\n';
  if (N) std::cout << "generalization gap (N=" << *N << ", rho=" << rho << ") = " << cc::generalization_gap(*N, v, rho)
                   << '\n';
  return 0;
}

int run_label_admissions(const std::string& input, std::uint64_t n1, std::uint64_t n2, double alpha,
                         const std::string& out, bool report) {
  const auto counts = cc::load_admission_csv(input);
  const auto rows = cc::test_admission_types(counts, n1, n2, alpha);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw cc::IoError("cannot write " + out);
    f << cc::admission_results_csv(rows);
  }
  const auto flagged = cc::flag_admission_types(counts, n1, n2, alpha);
  std::cout << flagged.size() << " of " << counts.size() << " types flagged at alpha=" << alpha << '\n';
  std::size_t degenerate = 0;
  for (const auto& r : rows) degenerate += r.test ? 0 : 1;
  if (degenerate) std::cout << degenerate << " types skipped (pooled proportion 0 or 1)\n";
  if (report) {
    for (const auto& [type, frac] : cc::cumulative_fraction_report(counts, n1, n2, alpha))
      std::cout << type << ' ' << frac << '\n';
  } else {
    for (const auto& t : flagged) std::cout << t << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint clustering and sparse classification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CLUSTCLASS_VERSION);

  std::string input, label = "label", out, archive, noise = "gaussian", truth, roc_dir;
  std::uint64_t seed = 0;
  ModelFlags flags;

  auto* synth = app.add_subcommand("synth", "generate a planted-cluster dataset");
  cc::SynthConfig sc;
  synth->add_option("--D", sc.D, "feature count")->capture_default_str();
  synth->add_option("--L", sc.L_true, "planted clusters")->capture_default_str();
  synth->add_option("--support-size", sc.support_size, "discriminative axes per cluster")->capture_default_str();
  synth->add_option("--N", sc.N, "rows")->capture_default_str();
  synth->add_option("--positive-ratio", sc.positive_ratio)->capture_default_str();
  synth->add_option("--separation", sc.separation)->capture_default_str();
  synth->add_option("--noise-sd", sc.noise_sd)->capture_default_str();
  synth->add_option("--skew", sc.skew, "0 = even cluster sizes")->capture_default_str();
  synth->add_option("--noise", noise, "gaussian | poisson")->capture_default_str();
  synth->add_flag("!--overlapping", sc.disjoint_supports, "allow cluster supports to overlap");
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("--truth", truth, "CSV of planted cluster per positive row");
  synth->add_option("--out", out, "output CSV")->required();

  auto* train = app.add_subcommand("train", "fit a model and save an archive");
  train->add_option("--input", input, "training CSV")->required();
  train->add_option("--label-column", label)->capture_default_str();
  add_model_flags(train, flags, true);
  train->add_option("--seed", seed)->capture_default_str();
  train->add_option("--out", out, "archive path")->required();

  auto* predict = app.add_subcommand("predict", "score a CSV with a saved archive");
  predict->add_option("--archive", archive, "archive from train")->required();
  predict->add_option("--input", input, "CSV to score")->required();
  predict->add_option("--label-column", label, "ignored if absent; used for AUC if present")->capture_default_str();
  predict->add_option("--out", out, "prediction CSV (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "repeated random splits, mean/std test AUC per model");
  std::vector<std::string> models{"slsvm", "logreg", "klrt", "acc", "ct_baseline"};
  std::size_t repeats = 10;
  double fraction = 0.6;
  evaluate->add_option("--input", input)->required();
  evaluate->add_option("--label-column", label)->capture_default_str();
  evaluate->add_option("--model", models, "comma-separated model kinds")->delimiter(',')->capture_default_str();
  add_model_flags(evaluate, flags, false);
  evaluate->add_option("--seed", seed)->capture_default_str();
  evaluate->add_option("--repeats", repeats)->capture_default_str();
  evaluate->add_option("--train-fraction", fraction)->capture_default_str();
  evaluate->add_option("--roc-dir", roc_dir, "write one ROC CSV per model and split here")->check(CLI::ExistingDirectory);
  evaluate->add_option("--out", out, "table CSV (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "exact JCC optimum, MIP check and ACC gap");
  std::size_t cap = cc::kDefaultEnumerationCap;
  oracle->add_option("--input", input, "instance JSON, or a labeled CSV")->required();
  oracle->add_option("--label-column", label)->capture_default_str();
  add_model_flags(oracle, flags, false);
  oracle->add_option("--seed", seed)->capture_default_str();
  oracle->add_option("--cap", cap, "enumeration limit")->capture_default_str();

  auto* theory = app.add_subcommand("theory", "sample-size, VC and generalization bounds");
  int tL = 1, tD = 1;
  std::optional<int> tQ;
  std::optional<double> tN;
  double eps = 0.1, delta = 0.05, rho = 0.05;
  theory->add_option("--L", tL)->capture_default_str();
  theory->add_option("--D", tD)->capture_default_str();
  theory->add_option("--Q", tQ, "sparse support size (enables the sample-size bound)");
  theory->add_option("--epsilon", eps)->capture_default_str();
  theory->add_option("--delta", delta)->capture_default_str();
  theory->add_option("--N", tN, "training size (enables the generalization gap)");
  theory->add_option("--rho", rho, "confidence level of the gap")->capture_default_str();

  auto* admissions = app.add_subcommand("label-admissions", "flag admission types over-represented in population 1");
  std::uint64_t n1 = cc::kDefaultN1, n2 = cc::kDefaultN2;
  double alpha = cc::kDefaultAlpha;
  bool report = false;
  admissions->add_option("--input", input, "CSV of type,k1,k2")->required();
  admissions->add_option("--N1", n1)->capture_default_str();
  admissions->add_option("--N2", n2)->capture_default_str();
  admissions->add_option("--alpha", alpha)->capture_default_str();
  admissions->add_flag("--report", report, "print cumulative population-1 coverage of flagged types");
  admissions->add_option("--out", out, "per-type results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) {
      sc.seed = seed;
      return run_synth(sc, noise, out, truth);
    }
    if (*train) return run_train(input, label, flags, seed, out);
    if (*predict) return run_predict(archive, input, label, out);
    if (*evaluate) return run_evaluate(input, label, flags, models, seed, repeats, fraction, out, roc_dir);
    if (*oracle) return run_oracle(input, label, flags, seed, cap);
    if (*theory) return run_theory(tL, tD, tQ, eps, delta, tN, rho);
    if (*admissions) return run_label_admissions(input, n1, n2, alpha, out, report);
  } catch (const cc::Error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
