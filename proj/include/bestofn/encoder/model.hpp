#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bestofn/core/matrix.hpp"
#include "bestofn/core/rng.hpp"
#include "bestofn/graph/collective_graph.hpp"

namespace bestofn::encoder {

/// One mean-aggregator convolution: separate linear maps for a node's own
/// features and the arithmetic mean of its neighbors' features. Empty
/// neighborhoods aggregate to the zero vector.
struct SageLayer {
  Matrix w_self;   // out x in
  Matrix w_neigh;  // out x in
  std::vector<double> bias;

  SageLayer() = default;
  SageLayer(int out_dim, int in_dim)
      : w_self(out_dim, in_dim), w_neigh(out_dim, in_dim), bias(static_cast<std::size_t>(out_dim), 0.0) {}

  int in_dim() const { return w_self.cols; }
  int out_dim() const { return w_self.rows; }

  bool operator==(const SageLayer& o) const = default;
};

/// Two mean-aggregation convolutions with ReLU, a linear head, and a
/// linear shortcut from the raw input added to the head output.
struct EncoderModel {
  SageLayer conv1;  // input -> hidden
  SageLayer conv2;  // hidden -> hidden
  Matrix head_w;    // output x hidden
  std::vector<double> head_b;
  Matrix res_w;  // output x input
  std::vector<double> res_b;
  std::uint64_t init_seed = 0;

  int input_dim() const { return conv1.in_dim(); }
  int hidden_dim() const { return conv1.out_dim(); }
  int output_dim() const { return head_w.rows; }

  bool operator==(const EncoderModel& o) const = default;
};

/// Glorot-style fan-scaled uniform initialization with a fixed draw order;
/// biases zero. The gain widens the fan limit; the default keeps the
/// initial pair logits spread well away from the zero-logit saddle, where
/// reconstruction training otherwise stalls for many epochs.
EncoderModel init_model(std::uint64_t seed, int input_dim = 40, int hidden_dim = 20,
                        int output_dim = 3, double gain = 1.5);

/// Neighbor lists in ascending index order, from a symmetric 0/1 dense
/// adjacency with zero diagonal. Throws on asymmetry or nonzero diagonal.
std::vector<std::vector<int>> neighbor_lists(const std::vector<std::vector<double>>& adjacency);

/// Forward intermediates kept for the backward pass.
struct ForwardCache {
  Matrix x;        // N x input
  Matrix agg_x;    // neighbor means of x
  Matrix z1, h1;   // pre/post ReLU, N x hidden
  Matrix agg_h1;   // neighbor means of h1
  Matrix z2, h2;   // pre/post ReLU
  Matrix out;      // N x output
};

/// Full forward pass over a node-feature matrix and its neighbor lists.
ForwardCache sage_forward_cached(const EncoderModel& model, const Matrix& features,
                                 const std::vector<std::vector<int>>& neighbors);

/// Embeddings only (N x output). Validates adjacency shape and symmetry.
Matrix sage_forward(const EncoderModel& model, const Matrix& features,
                    const std::vector<std::vector<double>>& adjacency);

/// A graph ready for the encoder: features row per node in ascending key
/// order plus neighbor lists.
struct EncodedGraph {
  std::vector<std::string> order;
  Matrix features;
  std::vector<std::vector<int>> neighbors;
  std::vector<std::uint8_t> adjacency;  // row-major dense 0/1, N*N
  int n = 0;

  bool edge(int i, int j) const { return adjacency[static_cast<std::size_t>(i) * n + j] != 0; }
};

/// Extracts features (float tensors) and symmetrized adjacency from a
/// collective graph. Throws when a node's tensor is not the expected width.
EncodedGraph prepare_graph(const graph::CollectiveGraph& graph, int expected_width = 40);

/// One forward pass over the whole graph, keyed by node.
std::map<std::string, std::array<double, 3>> embed_graph(const EncoderModel& model,
                                                         const graph::CollectiveGraph& graph);

void save_model(const EncoderModel& model, const std::string& path);
EncoderModel load_model(const std::string& path);

}  // namespace bestofn::encoder
