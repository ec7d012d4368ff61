#include "bestofn/encoder/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace bestofn::encoder {

namespace {

void glorot_fill(Matrix& w, Rng& rng, double gain) {
  const double limit = gain * std::sqrt(6.0 / (w.rows + w.cols));
  for (double& v : w.data) v = rng.uniform(-limit, limit);
}

// Neighbor means accumulate per column in ascending value order, so the
// result is exactly invariant under any relabeling of the nodes.
void aggregate_means(const Matrix& in, const std::vector<std::vector<int>>& neighbors,
                     Matrix& out) {
  const int cols = in.cols;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < in.rows; ++v) {
    double* ov = out.row(v);
    std::fill(ov, ov + cols, 0.0);
    const auto& nv = neighbors[static_cast<std::size_t>(v)];
    if (nv.empty()) continue;
    const double inv = 1.0 / static_cast<double>(nv.size());
    std::vector<double> column(nv.size());
    for (int c = 0; c < cols; ++c) {
      for (std::size_t k = 0; k < nv.size(); ++k) {
        column[k] = in(nv[k], c);
      }
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (double value : column) sum += value;
      ov[c] = sum * inv;
    }
  }
}

void layer_forward(const SageLayer& layer, const Matrix& h, const Matrix& agg, Matrix& z) {
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h.rows; ++v) {
    const double* hv = h.row(v);
    const double* av = agg.row(v);
    double* zv = z.row(v);
    for (int r = 0; r < layer.out_dim(); ++r) {
      const double* ws = layer.w_self.row(r);
      const double* wn = layer.w_neigh.row(r);
      double sum = layer.bias[static_cast<std::size_t>(r)];
      for (int c = 0; c < layer.in_dim(); ++c) sum += ws[c] * hv[c] + wn[c] * av[c];
      zv[r] = sum;
    }
  }
}

Matrix relu(const Matrix& z) {
  Matrix h = z;
  for (double& v : h.data) v = v > 0.0 ? v : 0.0;
  return h;
}

}  // namespace

EncoderModel init_model(std::uint64_t seed, int input_dim, int hidden_dim, int output_dim,
                        double gain) {
  EncoderModel model;
  model.init_seed = seed;
  model.conv1 = SageLayer(hidden_dim, input_dim);
  model.conv2 = SageLayer(hidden_dim, hidden_dim);
  model.head_w = Matrix(output_dim, hidden_dim);
  model.head_b.assign(static_cast<std::size_t>(output_dim), 0.0);
  model.res_w = Matrix(output_dim, input_dim);
  model.res_b.assign(static_cast<std::size_t>(output_dim), 0.0);

  Rng rng(seed);
  glorot_fill(model.conv1.w_self, rng, gain);
  glorot_fill(model.conv1.w_neigh, rng, gain);
  glorot_fill(model.conv2.w_self, rng, gain);
  glorot_fill(model.conv2.w_neigh, rng, gain);
  glorot_fill(model.head_w, rng, gain);
  glorot_fill(model.res_w, rng, gain);
  return model;
}

std::vector<std::vector<int>> neighbor_lists(const std::vector<std::vector<double>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(adjacency[static_cast<std::size_t>(i)].size()) != n) {
      throw std::invalid_argument("adjacency matrix is not square");
    }
    if (adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] != 0.0) {
      throw std::invalid_argument("adjacency diagonal must be zero");
    }
    for (int j = 0; j < n; ++j) {
      const double a = adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (a != 0.0 && a != 1.0) throw std::invalid_argument("adjacency entries must be 0 or 1");
      if (a != adjacency[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("adjacency matrix is not symmetric");
      }
      if (a == 1.0) neighbors[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return neighbors;
}

ForwardCache sage_forward_cached(const EncoderModel& model, const Matrix& features,
                                 const std::vector<std::vector<int>>& neighbors) {
  if (features.cols != model.input_dim()) {
    throw std::invalid_argument("feature width " + std::to_string(features.cols) +
                                " does not match encoder input " +
                                std::to_string(model.input_dim()));
  }
  if (static_cast<int>(neighbors.size()) != features.rows) {
    throw std::invalid_argument("neighbor lists do not cover every node");
  }
  const int n = features.rows;
  ForwardCache cache;
  cache.x = features;
  cache.agg_x = Matrix(n, model.input_dim());
  aggregate_means(cache.x, neighbors, cache.agg_x);

  cache.z1 = Matrix(n, model.hidden_dim());
  layer_forward(model.conv1, cache.x, cache.agg_x, cache.z1);
  cache.h1 = relu(cache.z1);

  cache.agg_h1 = Matrix(n, model.hidden_dim());
  aggregate_means(cache.h1, neighbors, cache.agg_h1);
  cache.z2 = Matrix(n, model.hidden_dim());
  layer_forward(model.conv2, cache.h1, cache.agg_h1, cache.z2);
  cache.h2 = relu(cache.z2);

  cache.out = Matrix(n, model.output_dim());
#pragma omp parallel for schedule(static)
  for (int v = 0; v < n; ++v) {
    const double* h2v = cache.h2.row(v);
    const double* xv = cache.x.row(v);
    double* ov = cache.out.row(v);
    for (int r = 0; r < model.output_dim(); ++r) {
      double sum = model.head_b[static_cast<std::size_t>(r)] +
                   model.res_b[static_cast<std::size_t>(r)];
      const double* hw = model.head_w.row(r);
      for (int c = 0; c < model.hidden_dim(); ++c) sum += hw[c] * h2v[c];
      const double* rw = model.res_w.row(r);
      for (int c = 0; c < model.input_dim(); ++c) sum += rw[c] * xv[c];
      ov[r] = sum;
    }
  }
  return cache;
}

Matrix sage_forward(const EncoderModel& model, const Matrix& features,
                    const std::vector<std::vector<double>>& adjacency) {
  if (static_cast<int>(adjacency.size()) != features.rows) {
    throw std::invalid_argument("adjacency size does not match feature rows");
  }
  for (double v : features.data) {
    if (!std::isfinite(v)) throw std::invalid_argument("features must be finite");
  }
  auto neighbors = neighbor_lists(adjacency);
  return sage_forward_cached(model, features, neighbors).out;
}

EncodedGraph prepare_graph(const graph::CollectiveGraph& graph, int expected_width) {
  EncodedGraph enc;
  enc.order = graph.node_order();
  enc.n = static_cast<int>(enc.order.size());
  enc.features = Matrix(enc.n, expected_width);
  for (int i = 0; i < enc.n; ++i) {
    const auto& tensor = graph.node_at(enc.order[static_cast<std::size_t>(i)]).tensor;
    if (static_cast<int>(tensor.values.size()) != expected_width) {
      throw std::invalid_argument("node tensor width " + std::to_string(tensor.values.size()) +
                                  " does not match encoder input " +
                                  std::to_string(expected_width));
    }
    for (int c = 0; c < expected_width; ++c) {
      enc.features(i, c) = tensor.values[static_cast<std::size_t>(c)];
    }
  }
  auto dense = graph::adjacency_matrix(graph, enc.order);
  enc.neighbors = neighbor_lists(dense);
  enc.adjacency.assign(static_cast<std::size_t>(enc.n) * enc.n, 0);
  for (int i = 0; i < enc.n; ++i) {
    for (int j : enc.neighbors[static_cast<std::size_t>(i)]) {
      enc.adjacency[static_cast<std::size_t>(i) * enc.n + j] = 1;
    }
  }
  return enc;
}

std::map<std::string, std::array<double, 3>> embed_graph(const EncoderModel& model,
                                                         const graph::CollectiveGraph& graph) {
  EncodedGraph enc = prepare_graph(graph, model.input_dim());
  ForwardCache cache = sage_forward_cached(model, enc.features, enc.neighbors);
  std::map<std::string, std::array<double, 3>> result;
  for (int i = 0; i < enc.n; ++i) {
    std::array<double, 3> e{};
    for (int c = 0; c < model.output_dim() && c < 3; ++c) e[static_cast<std::size_t>(c)] = cache.out(i, c);
    result[enc.order[static_cast<std::size_t>(i)]] = e;
  }
  return result;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  return nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols) {
    throw std::runtime_error("model file: matrix payload has the wrong length");
  }
  return m;
}

nlohmann::json layer_to_json(const SageLayer& layer) {
  return nlohmann::json{{"w_self", matrix_to_json(layer.w_self)},
                        {"w_neigh", matrix_to_json(layer.w_neigh)},
                        {"bias", layer.bias}};
}

SageLayer layer_from_json(const nlohmann::json& j) {
  SageLayer layer;
  layer.w_self = matrix_from_json(j.at("w_self"));
  layer.w_neigh = matrix_from_json(j.at("w_neigh"));
  layer.bias = j.at("bias").get<std::vector<double>>();
  return layer;
}

}  // namespace

void save_model(const EncoderModel& model, const std::string& path) {
  nlohmann::json j{
      {"format_version", 1},
      {"init_seed", model.init_seed},
      {"conv1", layer_to_json(model.conv1)},
      {"conv2", layer_to_json(model.conv2)},
      {"head_w", matrix_to_json(model.head_w)},
      {"head_b", model.head_b},
      {"res_w", matrix_to_json(model.res_w)},
      {"res_b", model.res_b},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path);
  out << j.dump(2) << "\n";
}

EncoderModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("unsupported model format version");
  }
  EncoderModel model;
  model.init_seed = j.at("init_seed").get<std::uint64_t>();
  model.conv1 = layer_from_json(j.at("conv1"));
  model.conv2 = layer_from_json(j.at("conv2"));
  model.head_w = matrix_from_json(j.at("head_w"));
  model.head_b = j.at("head_b").get<std::vector<double>>();
  model.res_w = matrix_from_json(j.at("res_w"));
  model.res_b = j.at("res_b").get<std::vector<double>>();
  return model;
}

}  // namespace bestofn::encoder
