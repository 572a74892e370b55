#pragma once

#include "clustclass/acc.hpp"
#include "clustclass/klrt.hpp"
#include "clustclass/logreg.hpp"
#include "clustclass/quantize.hpp"
#include "clustclass/slsvm.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clustclass {

enum class ModelKind { kSlsvm, kLogreg, kKlrt, kAcc, kCtBaseline };

std::string to_string(ModelKind kind);
// Accepts slsvm, logreg, klrt, acc, ct_baseline. Throws ArgumentError.
ModelKind parse_model_kind(const std::string& name);

// Everything needed to fit one model kind from a raw training split.
struct TrainSpec {
  ModelKind kind = ModelKind::kSlsvm;
  // slsvm: the penalized form (C, rho) unless T is set, in which case the
  // budgeted form (lambda_plus, lambda_minus, T). acc / ct_baseline always use
  // the budgeted form, with T = +inf when unset.
  std::optional<double> T;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
  double C = 1.0;
  double rho = 0.0;
  double lambda = 1.0;  // logreg l1 weight
  std::size_t K = kDefaultLrtK;
  double smoothing = 1.0;
  int L = 2;
  std::uint64_t seed = 0;
  bool standardize = true;   // linear kinds only; klrt works on raw values
  bool sparse = true;        // ct_baseline: false drops the budget
  std::size_t restarts = 5;
  std::size_t max_iters = 100;
  AccInit init = AccInit::kRandom;
  bool all_cluster_features = false;
  double cluster_threshold = 0.01;
  QuantizationScheme scheme = QuantizationScheme::max_fraction_default();
};

// A fitted model plus everything required to score raw rows again.
struct ModelArchive {
  ModelKind kind = ModelKind::kSlsvm;
  std::vector<std::string> feature_names;
  Vector impute_means;        // fills missing cells at prediction time
  Standardizer standardizer;  // identity when not standardizing

  LinearModel linear;         // slsvm
  LogisticModel logistic;     // logreg
  LrtModel lrt;               // klrt
  Quantizer quantizer;        // klrt
  std::string scheme_text;    // klrt
  std::size_t K = kDefaultLrtK;
  AccModel acc;               // acc, ct_baseline

  std::map<std::string, std::string> config;  // training settings, as text
  std::string version;

  std::size_t dim() const { return feature_names.size(); }
};

struct RowPrediction {
  int cluster = -1;  // acc / ct_baseline only, 0-based
  double score = 0.0;
  int label = -1;
};

ModelArchive fit_model(const Dataset& train, const TrainSpec& spec);
// Rows are raw features; NaN cells are imputed with the training means.
std::vector<RowPrediction> predict(const ModelArchive& m, const Matrix& raw);
std::vector<double> predict_scores(const ModelArchive& m, const Matrix& raw);

}  // namespace clustclass
