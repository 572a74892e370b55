#include "clustclass/cohort.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace clustclass {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

ProportionTest proportion_ztest(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw ArgumentError("population totals must be positive");
  if (k1 > n1 || k2 > n2) throw ArgumentError("a count exceeds its population total");
  ProportionTest t{k1, n1, k2, n2};
  const double N1 = static_cast<double>(n1), N2 = static_cast<double>(n2);
  t.p1 = static_cast<double>(k1) / N1;
  t.p2 = static_cast<double>(k2) / N2;
  t.pooled = static_cast<double>(k1 + k2) / (N1 + N2);
  if (k1 + k2 == 0 || k1 + k2 == n1 + n2)
    throw DegenerateTestError("pooled proportion is " + std::to_string(t.pooled) + "; the test is undefined");
  t.q = 1.0 - t.pooled;
  t.sigma = std::sqrt(t.pooled * t.q * (1.0 / N1 + 1.0 / N2));
  t.z = (t.p1 - t.p2) / t.sigma;
  t.p_value = normal_upper_tail(t.z);
  return t;
}

std::vector<AdmissionTestRow> test_admission_types(const std::vector<AdmissionCounts>& counts, std::uint64_t n1,
                                                   std::uint64_t n2, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in [0, 1]");
  std::vector<AdmissionTestRow> rows;
  rows.reserve(counts.size());
  for (const auto& c : counts) {
    AdmissionTestRow row{c.type, std::nullopt, false};
    try {
      row.test = proportion_ztest(c.k1, n1, c.k2, n2);
      row.flagged = row.test->p_value <= alpha;
    } catch (const DegenerateTestError&) {
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<std::size_t> flagged_order(const std::vector<AdmissionTestRow>& rows) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].flagged) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].test->p_value < rows[b].test->p_value; });
  return idx;
}

std::uint64_t parse_count(const std::string& cell, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("line " + std::to_string(line) + ": '" + cell + "' is not a nonnegative integer count");
  return v;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> flag_admission_types(const std::vector<AdmissionCounts>& counts, std::uint64_t n1,
                                              std::uint64_t n2, double alpha) {
  const auto rows = test_admission_types(counts, n1, n2, alpha);
  std::vector<std::string> out;
  for (std::size_t i : flagged_order(rows)) out.push_back(rows[i].type);
  return out;
}

std::vector<std::pair<std::string, double>> cumulative_fraction_report(const std::vector<AdmissionCounts>& counts,
                                                                       std::uint64_t n1, std::uint64_t n2,
                                                                       double alpha) {
  const auto rows = test_admission_types(counts, n1, n2, alpha);
  std::vector<std::pair<std::string, double>> out;
  std::uint64_t covered = 0;
  for (std::size_t i : flagged_order(rows)) {
    covered += counts[i].k1;
    out.emplace_back(rows[i].type, static_cast<double>(covered) / static_cast<double>(n1));
  }
  return out;
}

std::vector<AdmissionCounts> parse_admission_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<AdmissionCounts> out;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields (type,k1,k2), found " +
                       std::to_string(cells.size()));
    out.push_back({cells[0], parse_count(cells[1], line_no), parse_count(cells[2], line_no)});
  }
  if (header) throw ParseError("admission CSV is empty");
  return out;
}

std::vector<AdmissionCounts> load_admission_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_admission_csv(ss.str());
}

std::string admission_results_csv(const std::vector<AdmissionTestRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "type,z,p_value,flagged\n";
  for (const auto& r : rows) {
    out << r.type << ',';
    if (r.test) out << r.test->z << ',' << r.test->p_value;
    else out << "NA,NA";
    out << ',' << (r.flagged ? 1 : 0) << '\n';
  }
  return out.str();
}

int select_target_year(const std::set<int>& hospitalization_years, std::pair<int, int> range, std::uint64_t seed) {
  const auto [first, last] = range;
  if (first > last) throw ArgumentError("year range is reversed");
  for (int y : hospitalization_years)
    if (y < first || y > last)
      throw ArgumentError("hospitalization year " + std::to_string(y) + " lies outside [" + std::to_string(first) +
                          ", " + std::to_string(last) + "]");
  if (hospitalization_years.empty()) return last;
  const int lo = *hospitalization_years.begin();
  const int hi = *hospitalization_years.rbegin();
  if (lo == hi) return lo;
  std::mt19937_64 rng(seed);
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace clustclass
