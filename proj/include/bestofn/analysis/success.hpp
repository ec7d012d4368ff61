#pragma once

#include <map>
#include <string>
#include <vector>

#include "bestofn/graph/collective_graph.hpp"

namespace bestofn::analysis {

struct NodeSuccess {
  long on_successful = 0;  // trajectories on which the node appears, ending in the best site
  long on_any = 0;         // trajectories on which the node appears at all
  double probability = 0.0;
  bool reliable = false;  // visited on >= 10% of trajectories
};

struct SuccessStats {
  std::map<std::string, NodeSuccess> per_node;
  long trajectory_count = 0;
};

/// Per-node success probability: the number of trajectories a node appears
/// on that end at the trial's best site, divided by the number it appears
/// on at all. A node counts once per trajectory regardless of revisits.
SuccessStats success_probability(const graph::CollectiveGraph& graph);

/// Success / Failure for terminal nodes of converged trials (best site
/// chosen or not), Hub for tensors with no site-oriented agent, otherwise
/// Intermediate. Success/Failure outrank Hub; conflicting terminal labels
/// resolve by majority, ties to Success.
std::map<std::string, graph::NodeLabel> label_nodes(const graph::CollectiveGraph& graph);

/// Writes the labels back into the graph's node table.
void apply_labels(graph::CollectiveGraph& graph);

/// Quality of the chosen site divided by the best available quality.
double success_metric(double chosen_quality, const std::vector<double>& qualities);

/// True when the tensor has no agent in a site-referencing state.
bool tensor_is_hub(const codec::StateTensor& tensor);

}  // namespace bestofn::analysis
