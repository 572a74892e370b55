#include "clustclass/dataset.hpp"

#include "clustclass/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace clustclass {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

// nullopt-like: returns NaN for empty / NA / non-numeric text.
double parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "NA") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    return std::numeric_limits<double>::quiet_NaN();
  return v;
}

}  // namespace

std::size_t Dataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::validate(bool require_finite) const {
  if (features.rows() < 1 || features.cols() < 1)
    throw SchemaError("dataset needs at least one row and one feature");
  if (labels.size() != rows())
    throw SchemaError("label count " + std::to_string(labels.size()) +
                      " does not match row count " + std::to_string(rows()));
  if (feature_names.size() != cols())
    throw SchemaError("feature name count does not match feature count");
  if (missing_mask.rows() != features.rows() || missing_mask.cols() != features.cols())
    throw SchemaError("missing mask shape does not match features");
  for (int y : labels)
    if (y != 1 && y != -1) throw SchemaError("label " + std::to_string(y) + " is not +1/-1");
  std::unordered_set<std::string> seen;
  for (const auto& n : feature_names)
    if (!seen.insert(n).second) throw SchemaError("duplicate feature name '" + n + "'");
  if (require_finite && !features.allFinite())
    throw SchemaError("dataset contains non-finite values");
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.missing_mask.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(src);
    out.missing_mask.row(static_cast<Eigen::Index>(r)) = missing_mask.row(src);
    out.labels.push_back(labels[rows[r]]);
  }
  out.feature_names = feature_names;
  return out;
}

Matrix Dataset::class_rows(int label) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) idx.push_back(i);
  Matrix out(static_cast<Eigen::Index>(idx.size()), features.cols());
  for (std::size_t r = 0; r < idx.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}

Dataset make_dataset(Matrix features, std::vector<int> labels, std::vector<std::string> names) {
  Dataset d;
  if (names.empty()) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) names.push_back("f" + std::to_string(j));
  }
  d.missing_mask = MissingMask::Constant(features.rows(), features.cols(), false);
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.feature_names = std::move(names);
  d.validate(false);
  return d;
}

namespace {

Dataset parse_csv_impl(const std::string& text, const std::string& label_column, bool* has_labels) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("CSV has no header row");
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  const bool labeled = label_it != header.end();
  if (has_labels) *has_labels = labeled;
  if (!labeled && !has_labels)
    throw SchemaError("label column '" + label_column + "' not found in header");
  const std::size_t label_pos = labeled ? static_cast<std::size_t>(label_it - header.begin()) : header.size();

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_pos) names.push_back(header[c]);
  if (names.empty()) throw SchemaError("CSV has no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    const double y = labeled ? parse_cell(cells[label_pos]) : -1.0;
    if (!(y == 1.0 || y == -1.0 || y == 0.0))
      throw SchemaError("line " + std::to_string(line_no) + ": label '" + cells[label_pos] +
                        "' is not one of +1, -1, 1, 0");
    raw_labels.push_back(y);
    std::vector<double> row;
    row.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (c != label_pos) row.push_back(parse_cell(cells[c]));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw SchemaError("CSV has no data rows");

  const bool has_zero = std::count(raw_labels.begin(), raw_labels.end(), 0.0) > 0;
  const bool has_minus = std::count(raw_labels.begin(), raw_labels.end(), -1.0) > 0;
  if (has_zero && has_minus)
    throw SchemaError("label column mixes 0 and -1; use either {1,0} or {+1,-1}");

  Dataset d;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto dim = static_cast<Eigen::Index>(names.size());
  d.features.resize(n, dim);
  d.missing_mask.resize(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      d.features(i, j) = v;
      d.missing_mask(i, j) = std::isnan(v);
    }
  }
  for (double y : raw_labels) d.labels.push_back(y > 0 ? 1 : -1);
  d.feature_names = std::move(names);
  d.validate(false);
  return d;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& label_column) {
  return parse_csv_impl(text, label_column, nullptr);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  return parse_csv(read_text(path), label_column);
}

Dataset parse_csv_optional_label(const std::string& text, const std::string& label_column, bool& has_labels) {
  return parse_csv_impl(text, label_column, &has_labels);
}

Dataset load_csv_optional_label(const std::filesystem::path& path, const std::string& label_column,
                                bool& has_labels) {
  return parse_csv_optional_label(read_text(path), label_column, has_labels);
}

void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (const auto& n : d.feature_names) out << n << ',';
  out << label_column << '\n';
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
      if (d.missing_mask(i, j) || std::isnan(d.features(i, j)))
        out << "NA";
      else
        out << d.features(i, j);
      out << ',';
    }
    out << d.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

Dataset impute_missing(const Dataset& d) {
  Dataset out = d;
  for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index observed = 0;
    bool any_missing = false;
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
      if (d.missing_mask(i, j)) {
        any_missing = true;
      } else {
        sum += d.features(i, j);
        ++observed;
      }
    }
    if (!any_missing) continue;
    if (observed == 0)
      throw ImputationError("feature '" + d.feature_names[static_cast<std::size_t>(j)] +
                            "' has no observed values");
    const double mean = sum / static_cast<double>(observed);
    for (Eigen::Index i = 0; i < d.features.rows(); ++i)
      if (d.missing_mask(i, j)) out.features(i, j) = mean;
  }
  return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0, 1)");
  const std::size_t n = d.rows();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  if (n_train < 1 || n_train >= n)
    throw ArgumentError("train fraction " + std::to_string(train_fraction) + " leaves an empty side for N=" +
                        std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {d.select_rows(train), d.select_rows(test)};
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale = Vector::Ones(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    if (var > 1e-24) s.scale(j) = std::sqrt(var);
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return {Vector::Zero(n), Vector::Ones(n)};
}

Matrix Standardizer::apply(const Matrix& x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Vector Standardizer::apply_row(const Eigen::Ref<const Vector>& x) const {
  return (x - mean).cwiseQuotient(scale);
}

Dataset Standardizer::apply(const Dataset& d) const {
  Dataset out = d;
  out.features = apply(d.features);
  return out;
}

Vector label_correlations(const Dataset& d) {
  const auto n = static_cast<double>(d.rows());
  Vector y(static_cast<Eigen::Index>(d.rows()));
  for (std::size_t i = 0; i < d.rows(); ++i) y(static_cast<Eigen::Index>(i)) = d.labels[i];
  const Vector yc = y.array() - y.mean();
  const double y_ss = yc.squaredNorm();
  Vector corr = Vector::Zero(d.features.cols());
  if (y_ss <= 0.0) return corr;
  for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
    const Vector xc = d.features.col(j).array() - d.features.col(j).sum() / n;
    const double x_ss = xc.squaredNorm();
    if (x_ss > 0.0) corr(j) = xc.dot(yc) / std::sqrt(x_ss * y_ss);
  }
  return corr;
}

std::vector<double> summarize_time_blocks(std::span<const FactorRecord> records,
                                          std::span<const std::string> factor_ids,
                                          int target_year, EarlyBlockMode mode) {
  std::map<std::string, std::size_t> index;
  for (std::size_t f = 0; f < factor_ids.size(); ++f) index.emplace(factor_ids[f], f);
  std::vector<double> out(4 * factor_ids.size(), 0.0);
  std::vector<std::size_t> early_counts(factor_ids.size(), 0);
  for (const auto& r : records) {
    if (r.year >= target_year)
      throw LeakageError("record for '" + r.factor_id + "' in year " + std::to_string(r.year) +
                         " is not before target year " + std::to_string(target_year));
    const auto it = index.find(r.factor_id);
    if (it == index.end()) continue;
    const int lag = target_year - r.year;  // >= 1
    const std::size_t block = lag <= 3 ? static_cast<std::size_t>(lag - 1) : 3;
    out[4 * it->second + block] += r.value;
    if (block == 3) ++early_counts[it->second];
  }
  if (mode == EarlyBlockMode::kAverage) {
    for (std::size_t f = 0; f < factor_ids.size(); ++f)
      if (early_counts[f] > 0) out[4 * f + 3] /= static_cast<double>(early_counts[f]);
  }
  return out;
}

std::vector<std::string> time_block_names(std::span<const std::string> factor_ids) {
  std::vector<std::string> names;
  for (const auto& f : factor_ids)
    for (int b = 1; b <= 4; ++b) names.push_back(f + "@b" + std::to_string(b));
  return names;
}

}  // namespace clustclass
