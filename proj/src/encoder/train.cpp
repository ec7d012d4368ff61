#include "bestofn/encoder/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bestofn::encoder {

namespace {

// Parameter tensors in a fixed traversal order shared by the optimizer,
// the clip, and the finite-difference sweep.
std::vector<std::vector<double>*> parameter_views(EncoderModel& model) {
  return {
      &model.conv1.w_self.data, &model.conv1.w_neigh.data, &model.conv1.bias,
      &model.conv2.w_self.data, &model.conv2.w_neigh.data, &model.conv2.bias,
      &model.head_w.data,       &model.head_b,             &model.res_w.data,
      &model.res_b,
  };
}

std::vector<const std::vector<double>*> gradient_views(const Gradients& grads) {
  return {
      &grads.conv1.w_self.data, &grads.conv1.w_neigh.data, &grads.conv1.bias,
      &grads.conv2.w_self.data, &grads.conv2.w_neigh.data, &grads.conv2.bias,
      &grads.head_w.data,       &grads.head_b,             &grads.res_w.data,
      &grads.res_b,
  };
}

class AdamState {
 public:
  explicit AdamState(const EncoderModel& model) {
    EncoderModel scratch = model;
    for (const auto* view : parameter_views(scratch)) {
      m_.emplace_back(view->size(), 0.0);
      v_.emplace_back(view->size(), 0.0);
    }
  }

  void update(EncoderModel& model, const Gradients& grads, const TrainConfig& cfg) {
    ++step_;
    auto params = parameter_views(model);
    auto gradients = gradient_views(grads);

    double norm_sq = 0.0;
    for (const auto* g : gradients) {
      for (double v : *g) norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    const double scale = (cfg.grad_clip_norm > 0.0 && norm > cfg.grad_clip_norm)
                             ? cfg.grad_clip_norm / norm
                             : 1.0;

    const double bias1 = 1.0 - std::pow(cfg.beta1, step_);
    const double bias2 = 1.0 - std::pow(cfg.beta2, step_);
    for (std::size_t t = 0; t < params.size(); ++t) {
      auto& p = *params[t];
      const auto& g = *gradients[t];
      auto& m = m_[t];
      auto& v = v_[t];
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double gi = g[i] * scale;
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
      }
    }
  }

 private:
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long step_ = 0;
};

}  // namespace

TrainResult train(EncoderModel model, const std::vector<EncodedGraph>& subgraphs,
                  const TrainConfig& config) {
  if (subgraphs.empty()) throw std::invalid_argument("no subgraph samples");
  for (const auto& g : subgraphs) {
    if (g.n < 2) throw std::invalid_argument("subgraph samples need at least two nodes");
  }
  if (config.learning_rate < 0.0) throw std::invalid_argument("learning rate must be >= 0");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");

  TrainResult result;
  AdamState adam(model);
  Gradients grads;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (const auto& graph : subgraphs) {
      const double loss = loss_and_gradients(model, graph, grads);
      if (std::isnan(loss)) {
        throw std::runtime_error("training diverged (NaN loss) at epoch " +
                                 std::to_string(epoch));
      }
      loss_sum += loss;
      adam.update(model, grads, config);
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(subgraphs.size()));
  }
  result.model = std::move(model);
  return result;
}

namespace {

double full_loss(const EncoderModel& model, const EncodedGraph& graph) {
  ForwardCache cache = sage_forward_cached(model, graph.features, graph.neighbors);
  return reconstruction_loss(cache.out, graph);
}

// Smallest |pre-activation| across both ReLU layers.
double min_kink_distance(const EncoderModel& model, const EncodedGraph& graph) {
  ForwardCache cache = sage_forward_cached(model, graph.features, graph.neighbors);
  double min_abs = std::numeric_limits<double>::infinity();
  for (double v : cache.z1.data) min_abs = std::min(min_abs, std::abs(v));
  for (double v : cache.z2.data) min_abs = std::min(min_abs, std::abs(v));
  return min_abs;
}

}  // namespace

double gradient_check(const EncoderModel& model, EncodedGraph graph, double epsilon) {
  if (epsilon < 1e-7 || epsilon > 1e-3) {
    throw std::invalid_argument("finite-difference epsilon out of [1e-7, 1e-3]");
  }

  // Keep every pre-activation clear of the ReLU kink so the central
  // difference stays on one linear piece.
  Rng jitter_rng(model.init_seed ^ 0x5eedULL);
  for (int attempt = 0; attempt < 32 && min_kink_distance(model, graph) < 1e-4; ++attempt) {
    for (double& v : graph.features.data) v += jitter_rng.uniform(-1e-3, 1e-3);
  }

  EncoderModel probe = model;
  Gradients grads;
  loss_and_gradients(probe, graph, grads);
  auto params = parameter_views(probe);
  auto analytic = gradient_views(grads);

  double max_rel_err = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = *params[t];
    const auto& a = *analytic[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + epsilon;
      const double loss_plus = full_loss(probe, graph);
      p[i] = saved - epsilon;
      const double loss_minus = full_loss(probe, graph);
      p[i] = saved;
      const double numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
      const double rel = std::abs(a[i] - numeric) / std::max(1e-12, std::abs(numeric));
      max_rel_err = std::max(max_rel_err, rel);
    }
  }
  return max_rel_err;
}

double edge_auc(const EncoderModel& model, const std::vector<EncodedGraph>& subgraphs) {
  std::vector<std::pair<double, int>> scored;  // (score, is_edge)
  for (const auto& graph : subgraphs) {
    ForwardCache cache = sage_forward_cached(model, graph.features, graph.neighbors);
    for (int i = 0; i < graph.n; ++i) {
      for (int j = i + 1; j < graph.n; ++j) {
        std::span<const double> a(cache.out.row(i), static_cast<std::size_t>(cache.out.cols));
        std::span<const double> b(cache.out.row(j), static_cast<std::size_t>(cache.out.cols));
        scored.emplace_back(edge_score(a, b), graph.edge(i, j) ? 1 : 0);
      }
    }
  }
  long positives = 0;
  for (const auto& [score, label] : scored) positives += label;
  const long negatives = static_cast<long>(scored.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("AUC needs both edges and non-edges");
  }

  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Mann-Whitney with average ranks over score ties.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (scored[k].second) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(positives) * (positives + 1);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

}  // namespace bestofn::encoder
