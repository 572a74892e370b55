#include "clustclass/pipeline.hpp"

#include "clustclass/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace clustclass {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSlsvm: return "slsvm";
    case ModelKind::kLogreg: return "logreg";
    case ModelKind::kKlrt: return "klrt";
    case ModelKind::kAcc: return "acc";
    case ModelKind::kCtBaseline: return "ct_baseline";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  for (auto k : {ModelKind::kSlsvm, ModelKind::kLogreg, ModelKind::kKlrt, ModelKind::kAcc, ModelKind::kCtBaseline})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown model kind '" + name + "' (expected slsvm, logreg, klrt, acc or ct_baseline)");
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Vector observed_means(const Dataset& d) {
  Vector means(static_cast<Eigen::Index>(d.cols()));
  for (Eigen::Index j = 0; j < means.size(); ++j) {
    double sum = 0.0;
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
      const double v = d.features(i, j);
      if (d.missing_mask(i, j) || std::isnan(v)) continue;
      sum += v;
      ++n;
    }
    means(j) = n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
  return means;
}

Matrix fill_missing(const Matrix& raw, const Vector& means) {
  Matrix x = raw;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (std::isnan(x(i, j))) x(i, j) = means(j);
  return x;
}

std::map<std::string, std::string> describe(const TrainSpec& s) {
  std::map<std::string, std::string> c;
  c["seed"] = std::to_string(s.seed);
  switch (s.kind) {
    case ModelKind::kSlsvm:
      if (s.T) {
        c["T"] = num(*s.T);
        c["lambda_plus"] = num(s.lambda_plus);
        c["lambda_minus"] = num(s.lambda_minus);
      } else {
        c["C"] = num(s.C);
        c["rho"] = num(s.rho);
      }
      break;
    case ModelKind::kLogreg: c["lambda"] = num(s.lambda); break;
    case ModelKind::kKlrt:
      c["K"] = std::to_string(s.K);
      c["smoothing"] = num(s.smoothing);
      break;
    case ModelKind::kAcc:
    case ModelKind::kCtBaseline:
      c["L"] = std::to_string(s.L);
      c["T"] = num(s.T.value_or(std::numeric_limits<double>::infinity()));
      c["lambda_plus"] = num(s.lambda_plus);
      c["lambda_minus"] = num(s.lambda_minus);
      if (s.kind == ModelKind::kAcc) {
        c["restarts"] = std::to_string(s.restarts);
        c["max_iters"] = std::to_string(s.max_iters);
      } else {
        c["sparse"] = s.sparse ? "true" : "false";
      }
      break;
  }
  c["standardize"] = s.standardize ? "true" : "false";
  return c;
}

}  // namespace

ModelArchive fit_model(const Dataset& raw_train, const TrainSpec& spec) {
  raw_train.validate(false);
  if (raw_train.count_label(1) == 0 || raw_train.count_label(-1) == 0)
    throw FitError("training split needs both classes");
  ModelArchive m;
  m.kind = spec.kind;
  m.feature_names = raw_train.feature_names;
  m.impute_means = observed_means(raw_train);
  m.config = describe(spec);
  m.version = CLUSTCLASS_VERSION;
  const Dataset imputed = impute_missing(raw_train);

  if (spec.kind == ModelKind::kKlrt) {
    m.standardizer = Standardizer::identity(imputed.cols());
    m.quantizer = fit_quantizer(imputed, spec.scheme);
    m.scheme_text = spec.scheme.to_text();
    if (spec.K < 1 || spec.K > imputed.cols())
      throw ArgumentError("K must lie in [1, " + std::to_string(imputed.cols()) + "]");
    m.K = spec.K;
    m.lrt = fit_lrt(quantize(imputed, m.quantizer), spec.smoothing);
    return m;
  }

  m.standardizer = spec.standardize ? Standardizer::fit(imputed.features) : Standardizer::identity(imputed.cols());
  const Dataset train = m.standardizer.apply(imputed);
  switch (spec.kind) {
    case ModelKind::kSlsvm:
      if (spec.T) {
        m.linear = train_constrained(train.class_rows(1), train.class_rows(-1),
                                     {spec.lambda_plus, spec.lambda_minus, *spec.T})
                       .model;
      } else {
        m.linear = train_penalized(train, {spec.C, spec.rho}).model;
      }
      break;
    case ModelKind::kLogreg: m.logistic = train_lr(train, spec.lambda); break;
    case ModelKind::kAcc:
    case ModelKind::kCtBaseline: {
      const SvmConstrainedParams p{spec.lambda_plus, spec.lambda_minus,
                                   spec.T.value_or(std::numeric_limits<double>::infinity())};
      const auto features = spec.all_cluster_features ? all_features(train.cols())
                                                      : select_cluster_features(train, spec.cluster_threshold);
      if (spec.kind == ModelKind::kAcc) {
        AccConfig cfg;
        cfg.L = spec.L;
        cfg.params = p;
        cfg.max_iters = spec.max_iters;
        cfg.init = spec.init;
        cfg.seed = spec.seed;
        cfg.restarts = spec.restarts;
        m.acc = acc_train(train, cfg, features);
      } else {
        m.acc = ct_baseline(train.class_rows(1), train.class_rows(-1), spec.L, spec.sparse, p, spec.seed, features);
      }
      break;
    }
    case ModelKind::kKlrt: break;
  }
  return m;
}

std::vector<RowPrediction> predict(const ModelArchive& m, const Matrix& raw) {
  if (static_cast<std::size_t>(raw.cols()) != m.dim())
    throw SchemaError("input has " + std::to_string(raw.cols()) + " features, model expects " +
                      std::to_string(m.dim()));
  const Matrix filled = fill_missing(raw, m.impute_means);
  std::vector<RowPrediction> out(static_cast<std::size_t>(raw.rows()));
  if (m.kind == ModelKind::kKlrt) {
    Dataset d = make_dataset(filled, std::vector<int>(static_cast<std::size_t>(raw.rows()), -1), m.feature_names);
    const QuantizedDataset q = quantize(d, m.quantizer);
    const auto s = score_klrt_all(m.lrt, q, m.K);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {-1, s[i], s[i] > 0.0 ? 1 : -1};
    return out;
  }
  const Matrix x = m.standardizer.apply(filled);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector row = x.row(i).transpose();
    auto& p = out[static_cast<std::size_t>(i)];
    switch (m.kind) {
      case ModelKind::kSlsvm:
        p.score = decision_value(m.linear, row);
        p.label = p.score > 0.0 ? 1 : -1;
        break;
      case ModelKind::kLogreg:
        p.score = lr_logit(m.logistic, row);
        p.label = p.score > 0.0 ? 1 : -1;
        break;
      case ModelKind::kAcc:
      case ModelKind::kCtBaseline: {
        const auto a = acc_predict(m.acc, row);
        p = {a.cluster, a.decision_value, a.label};
        break;
      }
      case ModelKind::kKlrt: break;
    }
  }
  return out;
}

std::vector<double> predict_scores(const ModelArchive& m, const Matrix& raw) {
  const auto p = predict(m, raw);
  std::vector<double> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) s[i] = p[i].score;
  return s;
}

}  // namespace clustclass
