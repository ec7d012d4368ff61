#include "bestofn/encoder/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace bestofn::encoder {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double edge_score(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("edge_score: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return sigmoid(dot);
}

double bce_with_logits(double logit, double target) {
  // max(l,0) - l*t + log(1 + e^{-|l|}); never forms an intermediate sigmoid.
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

namespace {

void check_finite(const Matrix& embeddings) {
  for (double v : embeddings.data) {
    if (std::isnan(v)) throw std::runtime_error("NaN embedding in reconstruction loss");
  }
}

inline double pair_logit(const double* a, const double* b, int dim) {
  double dot = 0.0;
  for (int c = 0; c < dim; ++c) dot += a[c] * b[c];
  return dot;
}

}  // namespace

double reconstruction_loss(const Matrix& embeddings, const EncodedGraph& graph) {
  check_finite(embeddings);
  const int n = embeddings.rows;
  if (n != graph.n) throw std::invalid_argument("embedding rows do not match graph size");
  if (n < 2) throw std::invalid_argument("need at least two nodes");
  const int dim = embeddings.cols;
  const double inv_pairs = 1.0 / (0.5 * static_cast<double>(n) * (n - 1));
  std::vector<double> row_loss(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* ei = embeddings.row(i);
    double acc = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double logit = pair_logit(ei, embeddings.row(j), dim);
      acc += bce_with_logits(logit, graph.edge(i, j) ? 1.0 : 0.0);
    }
    row_loss[static_cast<std::size_t>(i)] = acc;
  }
  double total = 0.0;
  for (double v : row_loss) total += v;
  return total * inv_pairs;
}

double reconstruction_loss_grad(const Matrix& embeddings, const EncodedGraph& graph,
                                Matrix& grad_out) {
  check_finite(embeddings);
  const int n = embeddings.rows;
  if (n != graph.n) throw std::invalid_argument("embedding rows do not match graph size");
  if (n < 2) throw std::invalid_argument("need at least two nodes");
  const int dim = embeddings.cols;
  const double inv_pairs = 1.0 / (0.5 * static_cast<double>(n) * (n - 1));

  grad_out = Matrix(n, dim);
  std::vector<double> row_loss(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double* ei = embeddings.row(i);
    double* gi = grad_out.row(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* ej = embeddings.row(j);
      const double logit = pair_logit(ei, ej, dim);
      const double target = graph.edge(i, j) ? 1.0 : 0.0;
      if (j > i) acc += bce_with_logits(logit, target);
      const double coeff = (sigmoid(logit) - target) * inv_pairs;
      for (int c = 0; c < dim; ++c) gi[c] += coeff * ej[c];
    }
    row_loss[static_cast<std::size_t>(i)] = acc;
  }
  double total = 0.0;
  for (double v : row_loss) total += v;
  return total * inv_pairs;
}

namespace reference {

double reconstruction_loss_grad(const Matrix& embeddings, const EncodedGraph& graph,
                                Matrix& grad_out) {
  check_finite(embeddings);
  const int n = embeddings.rows;
  if (n != graph.n) throw std::invalid_argument("embedding rows do not match graph size");
  if (n < 2) throw std::invalid_argument("need at least two nodes");
  const int dim = embeddings.cols;
  const double inv_pairs = 1.0 / (0.5 * static_cast<double>(n) * (n - 1));

  grad_out = Matrix(n, dim);
  std::vector<double> row_loss(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double* ei = embeddings.row(i);
    for (int j = i + 1; j < n; ++j) {
      const double* ej = embeddings.row(j);
      const double logit = pair_logit(ei, ej, dim);
      const double target = graph.edge(i, j) ? 1.0 : 0.0;
      row_loss[static_cast<std::size_t>(i)] += bce_with_logits(logit, target);
      const double coeff = (sigmoid(logit) - target) * inv_pairs;
      for (int c = 0; c < dim; ++c) {
        grad_out(i, c) += coeff * ej[c];
        grad_out(j, c) += coeff * ei[c];
      }
    }
  }
  double total = 0.0;
  for (double v : row_loss) total += v;
  return total * inv_pairs;
}

}  // namespace reference

namespace {

// d(mean)/d(input) transpose: with symmetric adjacency, node u collects
// grad_v / deg(v) from every neighbor v.
void aggregate_transpose(const Matrix& grad, const std::vector<std::vector<int>>& neighbors,
                         Matrix& out) {
  const int cols = grad.cols;
#pragma omp parallel for schedule(static)
  for (int u = 0; u < grad.rows; ++u) {
    double* ou = out.row(u);
    std::fill(ou, ou + cols, 0.0);
    for (int v : neighbors[static_cast<std::size_t>(u)]) {
      const double inv = 1.0 / static_cast<double>(neighbors[static_cast<std::size_t>(v)].size());
      const double* gv = grad.row(v);
      for (int c = 0; c < cols; ++c) ou[c] += gv[c] * inv;
    }
  }
}

std::vector<double> column_sums(const Matrix& m) {
  std::vector<double> sums(static_cast<std::size_t>(m.cols), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (int c = 0; c < m.cols; ++c) sums[static_cast<std::size_t>(c)] += row[c];
  }
  return sums;
}

void relu_backward(const Matrix& z, Matrix& grad) {
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    if (z.data[i] <= 0.0) grad.data[i] = 0.0;
  }
}

}  // namespace

double loss_and_gradients(const EncoderModel& model, const EncodedGraph& graph, Gradients& grads) {
  ForwardCache cache = sage_forward_cached(model, graph.features, graph.neighbors);

  Matrix d_out;
  const double loss = reconstruction_loss_grad(cache.out, graph, d_out);

  grads.head_w = matmul_at(d_out, cache.h2);
  grads.head_b = column_sums(d_out);
  grads.res_w = matmul_at(d_out, cache.x);
  grads.res_b = column_sums(d_out);

  Matrix d_h2 = matmul(d_out, model.head_w);
  relu_backward(cache.z2, d_h2);  // d_h2 is now dZ2

  grads.conv2 = SageLayer(model.hidden_dim(), model.hidden_dim());
  grads.conv2.w_self = matmul_at(d_h2, cache.h1);
  grads.conv2.w_neigh = matmul_at(d_h2, cache.agg_h1);
  grads.conv2.bias = column_sums(d_h2);

  Matrix d_h1 = matmul(d_h2, model.conv2.w_self);
  Matrix d_from_agg = matmul(d_h2, model.conv2.w_neigh);
  Matrix d_agg(d_h1.rows, d_h1.cols);
  aggregate_transpose(d_from_agg, graph.neighbors, d_agg);
  for (std::size_t i = 0; i < d_h1.data.size(); ++i) d_h1.data[i] += d_agg.data[i];
  relu_backward(cache.z1, d_h1);  // d_h1 is now dZ1

  grads.conv1 = SageLayer(model.hidden_dim(), model.input_dim());
  grads.conv1.w_self = matmul_at(d_h1, cache.x);
  grads.conv1.w_neigh = matmul_at(d_h1, cache.agg_x);
  grads.conv1.bias = column_sums(d_h1);

  return loss;
}

}  // namespace bestofn::encoder
