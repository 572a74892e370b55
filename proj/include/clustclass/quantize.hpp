#pragma once

#include "clustclass/dataset.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clustclass {

// How one feature is mapped to discrete levels. Levels are 0-indexed: a value
// falls into level k when exactly k cut points are <= the value.
struct QuantizationRule {
  enum class Kind { kPassthrough, kFixedThresholds, kMaxFractionThresholds, kIndicator };

  Kind kind = Kind::kMaxFractionThresholds;
  // Cut points (kFixedThresholds) or fractions of the training max
  // (kMaxFractionThresholds). Must be strictly ascending.
  std::vector<double> params;
  // kPassthrough only: number of integer levels; 0 = infer from the data.
  int passthrough_levels = 0;

  static QuantizationRule passthrough(int levels = 0);
  static QuantizationRule fixed(std::vector<double> cuts);
  static QuantizationRule max_fraction(std::vector<double> fractions);
  static QuantizationRule indicator();

  void validate() const;
};

// Per-feature rules keyed by feature name, with an optional default for
// features not listed.
struct QuantizationScheme {
  std::map<std::string, QuantizationRule> rules;
  std::optional<QuantizationRule> default_rule;

  const QuantizationRule& rule_for(const std::string& feature) const;

  // Text format, one entry per line ('#' starts a comment):
  //   <feature|*> fixed <c1> <c2> ...
  //   <feature|*> maxfrac <f1> <f2> ...
  //   <feature|*> indicator
  //   <feature|*> passthrough [levels]
  static QuantizationScheme parse(const std::string& text);
  static QuantizationScheme load(const std::string& path);
  std::string to_text() const;

  // The table-style default: six cuts at 0.01%, 5%, 10%, 20%, 40%, 70% of each
  // feature's training max, for every feature.
  static QuantizationScheme max_fraction_default();
};

// One feature's resolved cut points.
struct FeatureQuantizer {
  QuantizationRule::Kind kind = QuantizationRule::Kind::kFixedThresholds;
  std::vector<double> cuts;  // resolved, absolute
  int levels = 1;

  int level(double value) const;
};

// A scheme resolved against a training split (max-fraction cuts and
// passthrough level counts frozen), so the same mapping applies to test data.
struct Quantizer {
  std::vector<FeatureQuantizer> features;
};

struct QuantizedDataset {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> levels;  // N x D
  std::vector<int> level_counts;                             // length D
  std::vector<int> labels;

  std::size_t rows() const { return static_cast<std::size_t>(levels.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(levels.cols()); }
};

Quantizer fit_quantizer(const Dataset& train, const QuantizationScheme& scheme);
QuantizedDataset quantize(const Dataset& d, const Quantizer& q);
// Resolves the scheme against `d` itself, then quantizes it.
QuantizedDataset quantize(const Dataset& d, const QuantizationScheme& scheme);

}  // namespace clustclass
