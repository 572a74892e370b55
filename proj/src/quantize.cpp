#include "clustclass/quantize.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace clustclass {

namespace {

using Kind = QuantizationRule::Kind;

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kPassthrough: return "passthrough";
    case Kind::kFixedThresholds: return "fixed";
    case Kind::kMaxFractionThresholds: return "maxfrac";
    case Kind::kIndicator: return "indicator";
  }
  return "?";
}

}  // namespace

QuantizationRule QuantizationRule::passthrough(int levels) {
  QuantizationRule r;
  r.kind = Kind::kPassthrough;
  r.passthrough_levels = levels;
  return r;
}

QuantizationRule QuantizationRule::fixed(std::vector<double> cuts) {
  QuantizationRule r;
  r.kind = Kind::kFixedThresholds;
  r.params = std::move(cuts);
  r.validate();
  return r;
}

QuantizationRule QuantizationRule::max_fraction(std::vector<double> fractions) {
  QuantizationRule r;
  r.kind = Kind::kMaxFractionThresholds;
  r.params = std::move(fractions);
  r.validate();
  return r;
}

QuantizationRule QuantizationRule::indicator() {
  QuantizationRule r;
  r.kind = Kind::kIndicator;
  return r;
}

void QuantizationRule::validate() const {
  for (std::size_t i = 1; i < params.size(); ++i)
    if (!(params[i] > params[i - 1]))
      throw ConfigError(std::string(kind_name(kind)) + " cut points must be strictly ascending");
  if (kind == Kind::kMaxFractionThresholds)
    for (double f : params)
      if (!(f > 0.0 && f < 1.0)) throw ConfigError("max-fraction cut points must lie in (0, 1)");
  if (kind == Kind::kPassthrough && passthrough_levels < 0)
    throw ConfigError("passthrough level count must be non-negative");
}

const QuantizationRule& QuantizationScheme::rule_for(const std::string& feature) const {
  if (const auto it = rules.find(feature); it != rules.end()) return it->second;
  if (default_rule) return *default_rule;
  throw ConfigError("quantization scheme has no rule for feature '" + feature + "'");
}

QuantizationScheme QuantizationScheme::parse(const std::string& text) {
  QuantizationScheme scheme;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string feature, kind;
    if (!(fields >> feature)) continue;
    if (!(fields >> kind))
      throw ConfigError("quantization line " + std::to_string(line_no) + ": missing rule");
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("quantization line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    QuantizationRule rule;
    try {
      if (kind == "fixed") {
        if (values.empty()) throw ConfigError("fixed rule needs at least one cut point");
        rule = QuantizationRule::fixed(values);
      } else if (kind == "maxfrac") {
        if (values.empty()) throw ConfigError("maxfrac rule needs at least one fraction");
        rule = QuantizationRule::max_fraction(values);
      } else if (kind == "indicator") {
        rule = QuantizationRule::indicator();
      } else if (kind == "passthrough") {
        rule = QuantizationRule::passthrough(values.empty() ? 0 : static_cast<int>(values[0]));
        rule.validate();
      } else {
        throw ConfigError("unknown rule '" + kind + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("quantization line " + std::to_string(line_no) + ": " + e.what());
    }
    if (feature == "*")
      scheme.default_rule = rule;
    else if (!scheme.rules.emplace(feature, rule).second)
      throw ConfigError("quantization line " + std::to_string(line_no) + ": duplicate feature '" +
                        feature + "'");
  }
  return scheme;
}

QuantizationScheme QuantizationScheme::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open quantization config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string QuantizationScheme::to_text() const {
  std::ostringstream out;
  out.precision(17);
  auto emit = [&](const std::string& name, const QuantizationRule& r) {
    out << name << ' ' << kind_name(r.kind);
    if (r.kind == Kind::kPassthrough && r.passthrough_levels > 0) out << ' ' << r.passthrough_levels;
    for (double v : r.params) out << ' ' << v;
    out << '\n';
  };
  if (default_rule) emit("*", *default_rule);
  for (const auto& [name, rule] : rules) emit(name, rule);
  return out.str();
}

QuantizationScheme QuantizationScheme::max_fraction_default() {
  QuantizationScheme s;
  s.default_rule = QuantizationRule::max_fraction({0.0001, 0.05, 0.10, 0.20, 0.40, 0.70});
  return s;
}

int FeatureQuantizer::level(double value) const {
  if (kind == Kind::kIndicator) return value != 0.0 ? 1 : 0;
  if (kind == Kind::kPassthrough) {
    const double r = std::round(value);
    if (r < 0 || r >= levels || r != value)
      throw ArgumentError("passthrough value " + std::to_string(value) + " is not a level in [0, " +
                          std::to_string(levels) + ")");
    return static_cast<int>(r);
  }
  if (cuts.empty()) return 0;
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

Quantizer fit_quantizer(const Dataset& train, const QuantizationScheme& scheme) {
  Quantizer q;
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const auto& rule = scheme.rule_for(train.feature_names[j]);
    rule.validate();
    const auto col = train.features.col(static_cast<Eigen::Index>(j));
    FeatureQuantizer fq;
    fq.kind = rule.kind;
    switch (rule.kind) {
      case Kind::kIndicator:
        fq.levels = 2;
        break;
      case Kind::kPassthrough:
        fq.levels = rule.passthrough_levels > 0
                        ? rule.passthrough_levels
                        : static_cast<int>(std::max(0.0, std::round(col.maxCoeff()))) + 1;
        break;
      case Kind::kFixedThresholds:
        fq.cuts = rule.params;
        fq.levels = static_cast<int>(fq.cuts.size()) + 1;
        break;
      case Kind::kMaxFractionThresholds: {
        const double max = col.maxCoeff();
        fq.levels = static_cast<int>(rule.params.size()) + 1;
        // A non-positive max leaves no cuts: every row maps to level 0.
        if (max > 0.0)
          for (double f : rule.params) fq.cuts.push_back(f * max);
        break;
      }
    }
    q.features.push_back(std::move(fq));
  }
  return q;
}

QuantizedDataset quantize(const Dataset& d, const Quantizer& q) {
  if (q.features.size() != d.cols())
    throw ArgumentError("quantizer covers " + std::to_string(q.features.size()) + " features, dataset has " +
                        std::to_string(d.cols()));
  QuantizedDataset out;
  out.levels.resize(d.features.rows(), d.features.cols());
  out.labels = d.labels;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    const auto& fq = q.features[j];
    out.level_counts.push_back(fq.levels);
    for (Eigen::Index i = 0; i < d.features.rows(); ++i)
      out.levels(i, static_cast<Eigen::Index>(j)) = fq.level(d.features(i, static_cast<Eigen::Index>(j)));
  }
  return out;
}

QuantizedDataset quantize(const Dataset& d, const QuantizationScheme& scheme) {
  return quantize(d, fit_quantizer(d, scheme));
}

}  // namespace clustclass
