#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bestofn/core/matrix.hpp"

namespace bestofn::analysis {

struct TsneConfig {
  double perplexity = 15.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  std::uint64_t seed = 0;
  // Fixed schedule: early exaggeration x12 until iteration 250, momentum
  // 0.5 before / 0.8 after iteration 250, Gaussian init with std 1e-4.
  int exaggeration_end = 250;
  double exaggeration = 12.0;
};

struct TsneResult {
  std::vector<std::array<double, 2>> points;
  bool degenerate_input = false;  // all points identical: seeded jitter only
};

/// Symmetrized, normalized Gaussian input affinities. Each row's bandwidth
/// is bisected (<= 50 steps, entropy tolerance 1e-5) so the conditional
/// distribution hits the target perplexity. Rows of the conditional matrix
/// sum to 1; the returned joint matrix sums to 1 overall.
Matrix tsne_affinities(const Matrix& points, double perplexity);

/// One-row bandwidth calibration, exposed for testing: returns the
/// conditional probabilities of point `row` over all others.
std::vector<double> calibrate_row(const Matrix& squared_distances, int row, double perplexity);

/// Standard t-SNE to 2D: Student-t (1 dof) low-dimensional similarities,
/// KL gradient descent with momentum. Deterministic given the seed.
TsneResult tsne_2d(const Matrix& points, const TsneConfig& config);

/// Work buffers for the descent: momentum term, per-parameter adaptive
/// gains (the usual +0.2 / x0.8 rule, floored at 0.01), and the gradient.
struct TsneWorkspace {
  Matrix velocity;
  Matrix gains;
  Matrix gradient;

  TsneWorkspace(int n, int dims) : velocity(n, dims), gains(n, dims), gradient(n, dims) {
    gains.fill(1.0);
  }
};

namespace reference {

/// Serial implementations kept for parity tests and benchmarking.
Matrix tsne_affinities(const Matrix& points, double perplexity);

/// One gradient-descent iteration on the embedding, in place.
void tsne_gradient_step(const Matrix& affinity, Matrix& embedding, TsneWorkspace& work,
                        double momentum, double learning_rate);

}  // namespace reference

/// One gradient-descent iteration (OpenMP kernel), in place.
void tsne_gradient_step(const Matrix& affinity, Matrix& embedding, TsneWorkspace& work,
                        double momentum, double learning_rate);

}  // namespace bestofn::analysis
