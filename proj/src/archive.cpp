#include "clustclass/archive.hpp"

#include "clustclass/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace clustclass {

using nlohmann::json;

namespace {

// JSON has no inf/nan literals.
json real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("expected a number, found \"" + s + "\"");
  }
  if (!j.is_number()) throw SchemaError("expected a number, found " + j.dump());
  return j.get<double>();
}

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

Vector to_vector(const json& a) {
  if (!a.is_array()) throw SchemaError("expected an array, found " + a.dump());
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = real(a[i]);
  return v;
}

std::vector<double> to_std(const json& a) {
  const Vector v = to_vector(a);
  return {v.data(), v.data() + v.size()};
}

json mat(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(Vector(m.row(i).transpose())));
  return a;
}

Matrix to_matrix(const json& a, Eigen::Index cols_if_empty) {
  if (!a.is_array()) throw SchemaError("expected an array of rows");
  if (a.empty()) return Matrix(0, cols_if_empty);
  Matrix m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vector r = to_vector(a[i]);
    if (r.size() != m.cols()) throw SchemaError("ragged matrix row " + std::to_string(i));
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

json linear(const LinearModel& m) { return {{"beta", vec(m.beta)}, {"beta0", real(m.beta0)}}; }

LinearModel to_linear(const json& j) { return {to_vector(j.at("beta")), real(j.at("beta0"))}; }

int kind_code(QuantizationRule::Kind k) { return static_cast<int>(k); }

QuantizationRule::Kind kind_from(int code) {
  if (code < 0 || code > static_cast<int>(QuantizationRule::Kind::kIndicator))
    throw SchemaError("unknown quantizer kind " + std::to_string(code));
  return static_cast<QuantizationRule::Kind>(code);
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("archive is missing '") + key + "'");
  return j.at(key);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string archive_to_json(const ModelArchive& m) {
  json j;
  j["schema_version"] = kArchiveSchemaVersion;
  j["kind"] = to_string(m.kind);
  j["version"] = m.version;
  j["feature_names"] = m.feature_names;
  j["impute_means"] = vec(m.impute_means);
  j["standardizer"] = {{"mean", vec(m.standardizer.mean)}, {"scale", vec(m.standardizer.scale)}};
  j["config"] = m.config;
  json payload;
  switch (m.kind) {
    case ModelKind::kSlsvm: payload = linear(m.linear); break;
    case ModelKind::kLogreg:
      payload = {{"theta", vec(m.logistic.theta)}, {"theta0", real(m.logistic.theta0)},
                 {"lambda", real(m.logistic.lambda)}};
      break;
    case ModelKind::kKlrt: {
      json pmf = json::array();
      for (const auto& f : m.lrt.pmf) pmf.push_back({vec(f[0]), vec(f[1])});
      json quant = json::array();
      for (const auto& f : m.quantizer.features)
        quant.push_back({{"kind", kind_code(f.kind)}, {"cuts", vec(f.cuts)}, {"levels", f.levels}});
      payload = {{"pmf", pmf},      {"smoothing", real(m.lrt.smoothing)}, {"K", m.K},
                 {"quantizer", quant}, {"scheme", m.scheme_text}};
      break;
    }
    case ModelKind::kAcc:
    case ModelKind::kCtBaseline: {
      json models = json::array();
      for (const auto& lm : m.acc.models) models.push_back(linear(lm));
      payload = {{"L", m.acc.L},
                 {"models", models},
                 {"cluster_features", m.acc.cluster_features},
                 {"trace", vec(m.acc.trace)},
                 {"final_assignment", m.acc.final_assignment},
                 {"converged", m.acc.converged}};
      break;
    }
  }
  j["payload"] = payload;
  return j.dump(1);
}

ModelArchive archive_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    const int schema = field(j, "schema_version").get<int>();
    if (schema != kArchiveSchemaVersion)
      throw SchemaError("archive schema_version " + std::to_string(schema) + " is not supported (expected " +
                        std::to_string(kArchiveSchemaVersion) + ")");
    ModelArchive m;
    m.kind = parse_model_kind(field(j, "kind").get<std::string>());
    m.version = field(j, "version").get<std::string>();
    m.feature_names = field(j, "feature_names").get<std::vector<std::string>>();
    m.impute_means = to_vector(field(j, "impute_means"));
    const auto& st = field(j, "standardizer");
    m.standardizer = {to_vector(field(st, "mean")), to_vector(field(st, "scale"))};
    m.config = field(j, "config").get<std::map<std::string, std::string>>();
    const auto& p = field(j, "payload");
    switch (m.kind) {
      case ModelKind::kSlsvm: m.linear = to_linear(p); break;
      case ModelKind::kLogreg:
        m.logistic = {to_vector(field(p, "theta")), real(field(p, "theta0")), real(field(p, "lambda"))};
        break;
      case ModelKind::kKlrt:
        for (const auto& f : field(p, "pmf")) m.lrt.pmf.push_back({to_std(f.at(0)), to_std(f.at(1))});
        m.lrt.smoothing = real(field(p, "smoothing"));
        m.K = field(p, "K").get<std::size_t>();
        for (const auto& f : field(p, "quantizer"))
          m.quantizer.features.push_back(
              {kind_from(field(f, "kind").get<int>()), to_std(field(f, "cuts")), field(f, "levels").get<int>()});
        m.scheme_text = field(p, "scheme").get<std::string>();
        break;
      case ModelKind::kAcc:
      case ModelKind::kCtBaseline:
        m.acc.L = field(p, "L").get<int>();
        for (const auto& lm : field(p, "models")) m.acc.models.push_back(to_linear(lm));
        m.acc.cluster_features = field(p, "cluster_features").get<std::vector<std::size_t>>();
        m.acc.trace = to_std(field(p, "trace"));
        m.acc.final_assignment = field(p, "final_assignment").get<std::vector<int>>();
        m.acc.converged = field(p, "converged").get<bool>();
        if (static_cast<int>(m.acc.models.size()) != m.acc.L) throw SchemaError("archive model count differs from L");
        break;
    }
    if (m.impute_means.size() != static_cast<Eigen::Index>(m.dim()) ||
        m.standardizer.mean.size() != static_cast<Eigen::Index>(m.dim()))
      throw SchemaError("archive vectors do not match the feature count");
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed archive: ") + e.what());
  }
}

void save_archive(const ModelArchive& m, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << archive_to_json(m) << '\n';
}

ModelArchive load_archive(const std::filesystem::path& path) { return archive_from_json(read_file(path)); }

std::string jcc_instance_to_json(const JccInstance& inst) {
  json j = {{"positives", mat(inst.positives)},
            {"negatives", mat(inst.negatives)},
            {"L", inst.L},
            {"lambda_plus", real(inst.params.lambda_plus)},
            {"lambda_minus", real(inst.params.lambda_minus)},
            {"T", real(inst.params.T)},
            {"cluster_budgets", vec(inst.cluster_budgets)},
            {"intra_weight", real(inst.intra_weight)}};
  return j.dump(1);
}

JccInstance jcc_instance_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    JccInstance inst;
    inst.positives = to_matrix(field(j, "positives"), 0);
    inst.negatives = to_matrix(field(j, "negatives"), inst.positives.cols());
    if (inst.positives.rows() == 0) inst.positives.resize(0, inst.negatives.cols());
    inst.L = field(j, "L").get<int>();
    if (j.contains("lambda_plus")) inst.params.lambda_plus = real(j.at("lambda_plus"));
    if (j.contains("lambda_minus")) inst.params.lambda_minus = real(j.at("lambda_minus"));
    if (j.contains("T")) inst.params.T = real(j.at("T"));
    if (j.contains("cluster_budgets")) inst.cluster_budgets = to_std(j.at("cluster_budgets"));
    if (j.contains("intra_weight")) inst.intra_weight = real(j.at("intra_weight"));
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed instance: ") + e.what());
  }
}

JccInstance load_jcc_instance(const std::filesystem::path& path) { return jcc_instance_from_json(read_file(path)); }

}  // namespace clustclass
