#include "clustclass/synth.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace clustclass {

void SynthConfig::validate() const {
  if (D < 1) throw ConfigError("D must be at least 1");
  if (L_true < 1) throw ConfigError("L_true must be at least 1");
  if (support_size < 1 || support_size > D) throw ConfigError("support_size must lie in [1, D]");
  if (disjoint_supports && L_true * support_size > D)
    throw ConfigError("disjoint supports need L_true * support_size = " + std::to_string(L_true * support_size) +
                      " features but D = " + std::to_string(D));
  if (!(positive_ratio > 0.0 && positive_ratio < 1.0)) throw ConfigError("positive_ratio must lie in (0, 1)");
  if (!(separation >= 0.0) || !std::isfinite(separation)) throw ConfigError("separation must be finite and >= 0");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise_sd must be positive");
  if (!(skew >= 0.0)) throw ConfigError("skew must be >= 0");
  const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(N) * positive_ratio));
  if (n_pos < static_cast<std::size_t>(L_true)) throw ConfigError("fewer positives than planted clusters");
  if (n_pos >= N) throw ConfigError("no negatives left at this positive_ratio");
}

namespace {

std::vector<std::size_t> cluster_sizes(std::size_t n_pos, int L, double skew) {
  std::vector<double> w(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) w[static_cast<std::size_t>(l)] = std::pow(1.0 + skew, -l);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  // Largest-remainder rounding, at least one sample per cluster.
  std::vector<std::size_t> sizes(w.size(), 1);
  const std::size_t rest = n_pos - w.size();
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    const double share = static_cast<double>(rest) * w[l] / total;
    const auto whole = static_cast<std::size_t>(std::floor(share));
    sizes[l] += whole;
    used += whole;
    rem.emplace_back(share - static_cast<double>(whole), l);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < rest; ++k, ++used) ++sizes[rem[k].second];
  return sizes;
}

}  // namespace

PlantedData generate_planted(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.N) * cfg.positive_ratio));

  PlantedData out;
  std::vector<std::size_t> axes(static_cast<std::size_t>(cfg.D));
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  std::shuffle(axes.begin(), axes.end(), rng);
  for (int l = 0; l < cfg.L_true; ++l) {
    std::vector<std::size_t> s;
    if (cfg.disjoint_supports) {
      const auto begin = axes.begin() + static_cast<std::ptrdiff_t>(l) * cfg.support_size;
      s.assign(begin, begin + cfg.support_size);
    } else {
      std::vector<std::size_t> pool = axes;
      std::shuffle(pool.begin(), pool.end(), rng);
      s.assign(pool.begin(), pool.begin() + cfg.support_size);
    }
    std::sort(s.begin(), s.end());
    out.supports.push_back(std::move(s));
  }

  Matrix x(static_cast<Eigen::Index>(cfg.N), cfg.D);
  std::normal_distribution<double> gauss(0.0, cfg.noise_sd);
  const double rate = cfg.noise_sd * cfg.noise_sd;
  auto draw = [&](double shift) {
    if (cfg.noise == SynthNoise::kGaussian) return shift + gauss(rng);
    return static_cast<double>(std::poisson_distribution<long long>(rate + shift)(rng));
  };

  std::vector<int> labels(cfg.N, -1);
  const auto sizes = cluster_sizes(n_pos, cfg.L_true, cfg.skew);
  Eigen::Index row = 0;
  for (int l = 0; l < cfg.L_true; ++l) {
    Vector shift = Vector::Zero(cfg.D);
    for (std::size_t a : out.supports[static_cast<std::size_t>(l)]) shift(static_cast<Eigen::Index>(a)) = cfg.separation;
    for (std::size_t i = 0; i < sizes[static_cast<std::size_t>(l)]; ++i, ++row) {
      for (int d = 0; d < cfg.D; ++d) x(row, d) = draw(shift(d));
      labels[static_cast<std::size_t>(row)] = 1;
      out.assignment.push_back(l);
    }
  }
  for (; row < x.rows(); ++row)
    for (int d = 0; d < cfg.D; ++d) x(row, d) = draw(0.0);
  out.data = make_dataset(std::move(x), std::move(labels));
  return out;
}

}  // namespace clustclass
