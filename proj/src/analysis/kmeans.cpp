#include "bestofn/analysis/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bestofn/core/hash.hpp"
#include "bestofn/core/rng.hpp"

namespace bestofn::analysis {

namespace {

constexpr int kMaxLloydIterations = 300;

double squared_dist(const double* a, const double* b, int dims) {
  double sum = 0.0;
  for (int c = 0; c < dims; ++c) {
    const double diff = a[c] - b[c];
    sum += diff * diff;
  }
  return sum;
}

double assign_impl(const Matrix& points, const Matrix& centroids, std::vector<int>& labels,
                   bool parallel) {
  const int n = points.rows;
  const int k = centroids.rows;
  labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> costs(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double* p = points.row(i);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = squared_dist(p, centroids.row(c), points.cols);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    costs[static_cast<std::size_t>(i)] = best_d;
  }
  double inertia = 0.0;
  for (double v : costs) inertia += v;
  return inertia;
}

Matrix plus_plus_seeding(const Matrix& points, int k, Rng& rng) {
  const int n = points.rows;
  Matrix centroids(k, points.cols);
  int first = rng.uniform_int(n);
  std::copy_n(points.row(first), points.cols, centroids.row(0));

  std::vector<double> d2(static_cast<std::size_t>(n), 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int prev = 0; prev < c; ++prev) {
        best = std::min(best, squared_dist(points.row(i), centroids.row(prev), points.cols));
      }
      d2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    int chosen;
    if (total <= 0.0) {
      chosen = rng.uniform_int(n);  // all remaining points coincide
    } else {
      double u = rng.uniform01() * total;
      chosen = n - 1;
      double cumulative = 0.0;
      for (int i = 0; i < n; ++i) {
        cumulative += d2[static_cast<std::size_t>(i)];
        if (u < cumulative) {
          chosen = i;
          break;
        }
      }
    }
    std::copy_n(points.row(chosen), points.cols, centroids.row(c));
  }
  return centroids;
}

// Point farthest from its current centroid moves to the empty cluster.
void repair_empty_clusters(const Matrix& points, const Matrix& centroids,
                           std::vector<int>& labels, int k) {
  const int n = points.rows;
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  for (int label : labels) counts[static_cast<std::size_t>(label)] += 1;
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) continue;
    int farthest = -1;
    double farthest_d = -1.0;
    for (int i = 0; i < n; ++i) {
      const int owner = labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
      const double d = squared_dist(points.row(i), centroids.row(owner), points.cols);
      if (d > farthest_d) {
        farthest_d = d;
        farthest = i;
      }
    }
    if (farthest < 0) break;
    counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])] -= 1;
    labels[static_cast<std::size_t>(farthest)] = c;
    counts[static_cast<std::size_t>(c)] += 1;
  }
}

Matrix cluster_means(const Matrix& points, const std::vector<int>& labels, const Matrix& fallback,
                     int k) {
  Matrix sums(k, points.cols);
  std::vector<long> sizes(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < points.rows; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    sizes[static_cast<std::size_t>(c)] += 1;
    const double* p = points.row(i);
    double* s = sums.row(c);
    for (int d = 0; d < points.cols; ++d) s[d] += p[d];
  }
  for (int c = 0; c < k; ++c) {
    double* s = sums.row(c);
    if (sizes[static_cast<std::size_t>(c)] == 0) {
      std::copy_n(fallback.row(c), points.cols, s);
      continue;
    }
    const double inv = 1.0 / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    for (int d = 0; d < points.cols; ++d) s[d] *= inv;
  }
  return sums;
}

KmeansResult lloyd_once(const Matrix& points, int k, std::uint64_t seed) {
  Rng rng(seed);
  KmeansResult result;
  result.centroids = plus_plus_seeding(points, k, rng);

  std::vector<int> labels;
  assign_points(points, result.centroids, labels);
  repair_empty_clusters(points, result.centroids, labels, k);
  result.labels = labels;

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    result.iterations = iter + 1;
    result.centroids = cluster_means(points, result.labels, result.centroids, k);
    const double inertia = assign_points(points, result.centroids, labels);
    result.inertia_history.push_back(inertia);
    repair_empty_clusters(points, result.centroids, labels, k);
    if (labels == result.labels) break;  // assignment fixpoint
    result.labels = labels;
  }

  // Final centroids are the means of the final clusters; inertia matches.
  result.centroids = cluster_means(points, result.labels, result.centroids, k);
  result.inertia = 0.0;
  for (int i = 0; i < points.rows; ++i) {
    result.inertia += squared_dist(
        points.row(i), result.centroids.row(result.labels[static_cast<std::size_t>(i)]),
        points.cols);
  }
  return result;
}

}  // namespace

double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& labels) {
  return assign_impl(points, centroids, labels, true);
}

namespace reference {
double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& labels) {
  return assign_impl(points, centroids, labels, false);
}
}  // namespace reference

KmeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (points.rows < k) throw std::invalid_argument("fewer points than clusters");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");

  KmeansResult best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    KmeansResult candidate = lloyd_once(points, k, mix64(seed, static_cast<std::uint64_t>(r)));
    if (!have_best || candidate.inertia < best.inertia) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

}  // namespace bestofn::analysis
