#pragma once

#include <cstdint>
#include <vector>

#include "bestofn/encoder/loss.hpp"
#include "bestofn/encoder/model.hpp"

namespace bestofn::encoder {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double grad_clip_norm = 5.0;
  double validation_split = 0.2;
};

struct TrainResult {
  EncoderModel model;
  std::vector<double> loss_history;  // per-epoch mean loss over subgraphs
};

/// Full-batch passes over each subgraph, adaptive-moment updates with a
/// global gradient-norm clip. Subgraphs are visited in the given order
/// every epoch; each epoch records the mean pre-update loss. Throws when
/// the loss turns NaN, citing the epoch.
TrainResult train(EncoderModel model, const std::vector<EncodedGraph>& subgraphs,
                  const TrainConfig& config);

/// Max relative error between analytic and central-difference gradients
/// over every parameter: max |a - n| / max(1e-12, |n|). Pre-activations
/// within 1e-4 of a ReLU kink are nudged away by jittering the features
/// deterministically before checking.
double gradient_check(const EncoderModel& model, EncodedGraph graph, double epsilon);

/// ROC-AUC of sigma(x.y) pair scores against edge/non-edge labels, pooled
/// over the given subgraphs; average-rank tie handling.
double edge_auc(const EncoderModel& model, const std::vector<EncodedGraph>& subgraphs);

}  // namespace bestofn::encoder
