#include "bestofn/analysis/success.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bestofn::analysis {

SuccessStats success_probability(const graph::CollectiveGraph& graph) {
  SuccessStats stats;
  stats.trajectory_count = static_cast<long>(graph.trajectories().size());
  for (const auto& record : graph.trajectories()) {
    const bool successful = record.decided && record.chosen_site == record.best_site;
    std::set<std::string> seen(record.keys.begin(), record.keys.end());
    for (const auto& key : seen) {
      auto& node = stats.per_node[key];
      node.on_any += 1;
      if (successful) node.on_successful += 1;
    }
  }
  const double reliability_floor = 0.1 * static_cast<double>(stats.trajectory_count);
  for (auto& [key, node] : stats.per_node) {
    node.probability = static_cast<double>(node.on_successful) / static_cast<double>(node.on_any);
    node.reliable = static_cast<double>(node.on_any) >= reliability_floor;
  }
  return stats;
}

bool tensor_is_hub(const codec::StateTensor& tensor) {
  const int width = tensor.record_width;
  const int count = tensor.record_count();
  for (int r = 0; r < count; ++r) {
    const double* row = tensor.values.data() + static_cast<std::size_t>(r) * width;
    if (tensor.encoding == codec::Encoding::OneHot) {
      // Indicator columns 1..4 are R, A, T_HR, T_S.
      for (int c = 1; c <= 4; ++c) {
        if (row[c] == 1.0) return false;
      }
    } else {
      const bool padding = row[0] == 0.0 && row[1] == 1.0 && row[2] == 1.0 && row[3] == 1.0;
      if (padding) continue;
      // Grid codes below 4/6 are the site-oriented states R, A, T_HR, T_S.
      if (row[1] < 4.0 / 6.0) return false;
    }
  }
  return true;
}

std::map<std::string, graph::NodeLabel> label_nodes(const graph::CollectiveGraph& graph) {
  std::map<std::string, std::pair<long, long>> terminal_votes;  // key -> (success, failure)
  for (const auto& record : graph.trajectories()) {
    if (!record.decided || record.keys.empty()) continue;
    auto& votes = terminal_votes[record.keys.back()];
    if (record.chosen_site == record.best_site) {
      votes.first += 1;
    } else {
      votes.second += 1;
    }
  }

  std::map<std::string, graph::NodeLabel> labels;
  for (const auto& [key, node] : graph.nodes()) {
    auto vote = terminal_votes.find(key);
    if (vote != terminal_votes.end()) {
      labels[key] = vote->second.first >= vote->second.second ? graph::NodeLabel::Success
                                                              : graph::NodeLabel::Failure;
    } else if (tensor_is_hub(node.tensor)) {
      labels[key] = graph::NodeLabel::Hub;
    } else {
      labels[key] = graph::NodeLabel::Intermediate;
    }
  }
  return labels;
}

void apply_labels(graph::CollectiveGraph& graph) {
  for (const auto& [key, label] : label_nodes(graph)) {
    graph.node_at(key).label = label;
  }
}

double success_metric(double chosen_quality, const std::vector<double>& qualities) {
  if (qualities.empty()) throw std::invalid_argument("no site qualities");
  const double best = *std::max_element(qualities.begin(), qualities.end());
  if (best <= 0.0) throw std::invalid_argument("maximum quality must be positive");
  return chosen_quality / best;
}

}  // namespace bestofn::analysis
