#pragma once

#include "clustclass/dataset.hpp"

#include <cstdint>
#include <vector>

namespace clustclass {

struct KMeansResult {
  std::vector<int> assignment;  // 0-based cluster per row
  Matrix centroids;             // k x D
  std::size_t iterations = 0;
};

// Lloyd's algorithm from a k-means++ start. A cluster that empties is
// re-seeded with the point farthest from its current centroid.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, std::size_t max_iterations = 300);

}  // namespace clustclass
