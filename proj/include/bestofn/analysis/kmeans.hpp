#pragma once

#include <cstdint>
#include <vector>

#include "bestofn/core/matrix.hpp"

namespace bestofn::analysis {

struct KmeansResult {
  std::vector<int> labels;
  Matrix centroids;  // k x dims
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // post-assignment cost per Lloyd iteration
};

/// Lloyd iterations from k-means++ seeding until the assignment reaches a
/// fixpoint (or 300 iterations), best inertia over restarts (ties go to
/// the lowest restart). Empty clusters are repaired by stealing the point
/// farthest from its centroid. Deterministic given the seed.
KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 1);

/// Nearest-centroid assignment (OpenMP kernel); lowest index wins ties.
/// Returns the summed squared distance (inertia).
double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& labels);

namespace reference {
double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& labels);
}  // namespace reference

}  // namespace bestofn::analysis
