#pragma once

#include "clustclass/jcc.hpp"

#include <cstdint>
#include <vector>

namespace clustclass {

enum class SynthNoise { kGaussian, kPoisson };

struct SynthConfig {
  int D = 10;
  int L_true = 2;
  int support_size = 2;  // discriminative axes per cluster
  std::size_t N = 1000;
  double positive_ratio = 0.1697;
  double separation = 6.0;  // shift of each cluster's mean along its axes
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  bool disjoint_supports = true;
  SynthNoise noise = SynthNoise::kGaussian;
  // 0 splits positives evenly. Otherwise cluster l gets weight (1 + skew)^-l.
  double skew = 0.0;

  void validate() const;
};

struct PlantedData {
  Dataset data;  // rows: positives first (grouped by cluster), then negatives
  ClusterAssignment assignment;  // cluster of each positive, in row order
  std::vector<std::vector<std::size_t>> supports;
};

// Negatives are noise around the origin; cluster-l positives are the same
// noise shifted by +separation along that cluster's support axes. With the
// Poisson variant, each feature is a count with rate noise_sd^2 plus the
// shift. Throws ConfigError when disjoint supports cannot fit in D.
PlantedData generate_planted(const SynthConfig& cfg);

}  // namespace clustclass
