#pragma once

#include <span>

#include "bestofn/encoder/model.hpp"

namespace bestofn::encoder {

/// sigma(x . y): the reconstruction score for a node pair. Symmetric.
double edge_score(std::span<const double> x, std::span<const double> y);

double sigmoid(double v);

/// Numerically stable BCE with logits for a single pair.
double bce_with_logits(double logit, double target);

/// Mean BCE-with-logits over all unordered off-diagonal pairs, logits
/// taken as embedding dot products against the 0/1 adjacency. Throws on
/// NaN embeddings. Row-partial accumulation fixes the summation order, so
/// the result is independent of thread count.
double reconstruction_loss(const Matrix& embeddings, const EncodedGraph& graph);

/// Loss plus d(loss)/d(embeddings); the OpenMP kernel.
double reconstruction_loss_grad(const Matrix& embeddings, const EncodedGraph& graph,
                                Matrix& grad_out);

namespace reference {

/// Serial pair-loop implementation kept for parity testing and the
/// benchmark baseline. Bitwise-identical accumulation order.
double reconstruction_loss_grad(const Matrix& embeddings, const EncodedGraph& graph,
                                Matrix& grad_out);

}  // namespace reference

/// All parameter gradients for one subgraph.
struct Gradients {
  SageLayer conv1;
  SageLayer conv2;
  Matrix head_w;
  std::vector<double> head_b;
  Matrix res_w;
  std::vector<double> res_b;
};

/// Full forward + hand-derived backward pass; returns the loss.
double loss_and_gradients(const EncoderModel& model, const EncodedGraph& graph, Gradients& grads);

}  // namespace bestofn::encoder
