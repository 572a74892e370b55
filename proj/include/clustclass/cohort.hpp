#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace clustclass {

struct ProportionTest {
  std::uint64_t k1 = 0, n1 = 0, k2 = 0, n2 = 0;
  double p1 = 0.0, p2 = 0.0;
  double pooled = 0.0, q = 0.0;
  double sigma = 0.0;
  double z = 0.0;
  double p_value = 0.0;  // upper tail: P(Z >= z)
};

// Pooled two-proportion z-test of "population 1 has the higher rate".
// Throws DegenerateTestError when the pooled proportion is 0 or 1.
ProportionTest proportion_ztest(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

// Upper-tail standard normal probability.
double normal_upper_tail(double z);

inline constexpr double kDefaultAlpha = 0.0001;
inline constexpr std::uint64_t kDefaultN1 = 47352;
inline constexpr std::uint64_t kDefaultN2 = 116934;

struct AdmissionCounts {
  std::string type;
  std::uint64_t k1 = 0;
  std::uint64_t k2 = 0;
};

struct AdmissionTestRow {
  std::string type;
  std::optional<ProportionTest> test;  // empty when the test is degenerate
  bool flagged = false;
};

// Tests every type; rows come back in input order.
std::vector<AdmissionTestRow> test_admission_types(const std::vector<AdmissionCounts>& counts, std::uint64_t n1,
                                                   std::uint64_t n2, double alpha = kDefaultAlpha);

// Types with p-value <= alpha, ascending by p-value (ties by input order).
std::vector<std::string> flag_admission_types(const std::vector<AdmissionCounts>& counts, std::uint64_t n1,
                                              std::uint64_t n2, double alpha = kDefaultAlpha);

// Optional safeguard report: for the flagged types in p-value order, the
// cumulative share of population-1 admissions they cover.
std::vector<std::pair<std::string, double>> cumulative_fraction_report(const std::vector<AdmissionCounts>& counts,
                                                                       std::uint64_t n1, std::uint64_t n2,
                                                                       double alpha = kDefaultAlpha);

// CSV in: header then rows "type,k1,k2". CSV out: "type,z,p_value,flagged".
std::vector<AdmissionCounts> parse_admission_csv(const std::string& text);
std::vector<AdmissionCounts> load_admission_csv(const std::filesystem::path& path);
std::string admission_results_csv(const std::vector<AdmissionTestRow>& rows);

// Empty set -> last year of the range; one year -> that year; several ->
// uniform draw over [min, max], reproducible per seed.
int select_target_year(const std::set<int>& hospitalization_years, std::pair<int, int> range, std::uint64_t seed);

}  // namespace clustclass
