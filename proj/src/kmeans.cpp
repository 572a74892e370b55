#include "clustclass/kmeans.hpp"

#include "clustclass/error.hpp"

#include <limits>
#include <random>

namespace clustclass {

namespace {

int nearest(const Matrix& centroids, const Eigen::Ref<const Eigen::RowVectorXd>& point, double* dist) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist) *dist = best_d;
  return best;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, std::size_t max_iterations) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  if (x.rows() < k) throw ArgumentError("k-means needs at least k points");
  std::mt19937_64 rng(seed);
  const Eigen::Index n = x.rows();

  KMeansResult out;
  out.centroids.resize(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  out.centroids.row(0) = x.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(out.centroids.topRows(c), x.row(i), &d2[static_cast<std::size_t>(i)]);
      total += d2[static_cast<std::size_t>(i)];
    }
    Eigen::Index chosen = pick(rng);
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> weighted(d2.begin(), d2.end());
      chosen = weighted(rng);
    }
    out.centroids.row(c) = x.row(chosen);
  }

  out.assignment.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    out.iterations = iter + 1;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = nearest(out.centroids, x.row(i), nullptr);
      if (c != out.assignment[static_cast<std::size_t>(i)]) {
        out.assignment[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(out.assignment[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(out.assignment[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        out.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty: move the centroid onto the point farthest from its own centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto own = out.assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(own)] <= 1) continue;
        const double d = (x.row(i) - out.centroids.row(own)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(out.assignment[static_cast<std::size_t>(far)])];
      out.assignment[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      out.centroids.row(c) = x.row(far);
      changed = true;
    }
    if (!changed) break;
  }
  return out;
}

}  // namespace clustclass
