#include "bestofn/analysis/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bestofn/core/rng.hpp"

namespace bestofn::analysis {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 50;
constexpr double kMinProbability = 1e-12;

Matrix squared_distances(const Matrix& points) {
  const int n = points.rows;
  Matrix d2(n, n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* pi = points.row(i);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double* pj = points.row(j);
      double sum = 0.0;
      for (int c = 0; c < points.cols; ++c) {
        const double diff = pi[c] - pj[c];
        sum += diff * diff;
      }
      d2(i, j) = sum;
    }
  }
  return d2;
}

// Conditional probabilities for one row at bandwidth beta, plus the
// Shannon entropy (nats) of that distribution.
double row_entropy(const Matrix& d2, int row, double beta, std::vector<double>& probs) {
  const int n = d2.rows;
  double sum_p = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == row) {
      probs[static_cast<std::size_t>(j)] = 0.0;
      continue;
    }
    const double p = std::exp(-beta * d2(row, j));
    probs[static_cast<std::size_t>(j)] = p;
    sum_p += p;
  }
  if (sum_p <= 0.0) return 0.0;
  double entropy = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == row) continue;
    const double p = probs[static_cast<std::size_t>(j)] / sum_p;
    probs[static_cast<std::size_t>(j)] = p;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return entropy;
}

void calibrate_row_impl(const Matrix& d2, int row, double perplexity, std::vector<double>& probs) {
  const double target_entropy = std::log(perplexity);
  double beta = 1.0;
  double beta_min = -std::numeric_limits<double>::infinity();
  double beta_max = std::numeric_limits<double>::infinity();
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    const double entropy = row_entropy(d2, row, beta, probs);
    const double diff = entropy - target_entropy;
    if (std::abs(diff) < kEntropyTolerance) break;
    if (diff > 0.0) {  // distribution too flat: raise beta
      beta_min = beta;
      beta = std::isinf(beta_max) ? beta * 2.0 : 0.5 * (beta + beta_max);
    } else {
      beta_max = beta;
      beta = std::isinf(beta_min) ? beta * 0.5 : 0.5 * (beta + beta_min);
    }
  }
}

Matrix affinities_impl(const Matrix& points, double perplexity, bool parallel) {
  const int n = points.rows;
  if (n < 3) throw std::invalid_argument("t-SNE needs at least 3 points");
  if (perplexity >= (n - 1) / 3.0) {
    throw std::invalid_argument("perplexity too large for the number of points");
  }
  const Matrix d2 = squared_distances(points);
  Matrix conditional(n, n);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
      calibrate_row_impl(d2, i, perplexity, probs);
      for (int j = 0; j < n; ++j) conditional(i, j) = probs[static_cast<std::size_t>(j)];
    }
  } else {
    std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      calibrate_row_impl(d2, i, perplexity, probs);
      for (int j = 0; j < n; ++j) conditional(i, j) = probs[static_cast<std::size_t>(j)];
    }
  }

  // Joint affinities: symmetrize and normalize to a total mass of 1.
  Matrix joint(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      joint(i, j) = (conditional(i, j) + conditional(j, i)) / (2.0 * n);
    }
  }
  return joint;
}

void gradient_step_impl(const Matrix& affinity, Matrix& embedding, TsneWorkspace& work,
                        double momentum, double learning_rate, bool parallel) {
  const int n = embedding.rows;
  const int dims = embedding.cols;
  Matrix& velocity = work.velocity;
  Matrix& gains = work.gains;
  Matrix& gradient = work.gradient;

  // Student-t numerators and the global normalizer; per-row partials keep
  // the summation order fixed regardless of thread count.
  Matrix q_num(n, n);
  std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double* yi = embedding.row(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* yj = embedding.row(j);
      double d2 = 0.0;
      for (int c = 0; c < dims; ++c) {
        const double diff = yi[c] - yj[c];
        d2 += diff * diff;
      }
      const double q = 1.0 / (1.0 + d2);
      q_num(i, j) = q;
      acc += q;
    }
    row_sums[static_cast<std::size_t>(i)] = acc;
  }
  double sum_q = 0.0;
  for (double v : row_sums) sum_q += v;
  sum_q = std::max(sum_q, kMinProbability);

#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i) {
    const double* yi = embedding.row(i);
    double* gi = gradient.row(i);
    std::fill(gi, gi + dims, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* yj = embedding.row(j);
      const double q = q_num(i, j);
      const double mult = 4.0 * (affinity(i, j) - q / sum_q) * q;
      for (int c = 0; c < dims; ++c) gi[c] += mult * (yi[c] - yj[c]);
    }
  }

  for (int i = 0; i < n; ++i) {
    double* yi = embedding.row(i);
    double* vi = velocity.row(i);
    double* ki = gains.row(i);
    const double* gi = gradient.row(i);
    for (int c = 0; c < dims; ++c) {
      // Gain grows when the gradient keeps its direction, shrinks on flips.
      ki[c] = (gi[c] > 0.0) != (vi[c] > 0.0) ? ki[c] + 0.2 : ki[c] * 0.8;
      if (ki[c] < 0.01) ki[c] = 0.01;
      vi[c] = momentum * vi[c] - learning_rate * ki[c] * gi[c];
      yi[c] += vi[c];
    }
  }

  // Re-center the embedding each iteration.
  for (int c = 0; c < dims; ++c) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += embedding(i, c);
    mean /= static_cast<double>(n);
    for (int i = 0; i < n; ++i) embedding(i, c) -= mean;
  }
}

}  // namespace

std::vector<double> calibrate_row(const Matrix& squared, int row, double perplexity) {
  std::vector<double> probs(static_cast<std::size_t>(squared.rows), 0.0);
  calibrate_row_impl(squared, row, perplexity, probs);
  return probs;
}

Matrix tsne_affinities(const Matrix& points, double perplexity) {
  return affinities_impl(points, perplexity, true);
}

void tsne_gradient_step(const Matrix& affinity, Matrix& embedding, TsneWorkspace& work,
                        double momentum, double learning_rate) {
  gradient_step_impl(affinity, embedding, work, momentum, learning_rate, true);
}

namespace reference {

Matrix tsne_affinities(const Matrix& points, double perplexity) {
  return affinities_impl(points, perplexity, false);
}

void tsne_gradient_step(const Matrix& affinity, Matrix& embedding, TsneWorkspace& work,
                        double momentum, double learning_rate) {
  gradient_step_impl(affinity, embedding, work, momentum, learning_rate, false);
}

}  // namespace reference

TsneResult tsne_2d(const Matrix& points, const TsneConfig& config) {
  const int n = points.rows;
  if (n < 3) throw std::invalid_argument("t-SNE needs at least 3 points");

  TsneResult result;
  Rng rng(config.seed);
  Matrix embedding(n, 2);
  for (double& v : embedding.data) v = 1e-4 * rng.gaussian();

  // All-identical input has no geometry to embed; return the seeded jitter.
  const Matrix d2 = squared_distances(points);
  double max_d2 = 0.0;
  for (double v : d2.data) max_d2 = std::max(max_d2, v);
  if (max_d2 == 0.0) {
    result.degenerate_input = true;
  } else {
    Matrix affinity = tsne_affinities(points, config.perplexity);
    for (double& v : affinity.data) v = std::max(v * config.exaggeration, kMinProbability);

    TsneWorkspace work(n, 2);
    bool exaggerated = true;
    for (int iter = 0; iter < config.iterations; ++iter) {
      if (exaggerated && iter >= config.exaggeration_end) {
        for (double& v : affinity.data) {
          v = std::max(v / config.exaggeration, kMinProbability);
        }
        exaggerated = false;
      }
      const double momentum = iter < config.exaggeration_end ? 0.5 : 0.8;
      tsne_gradient_step(affinity, embedding, work, momentum, config.learning_rate);
    }
  }

  result.points.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    result.points[static_cast<std::size_t>(i)] = {embedding(i, 0), embedding(i, 1)};
  }
  return result;
}

}  // namespace bestofn::analysis
