#include "bestofn/graph/collective_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

namespace bestofn::graph {

const char* to_string(NodeLabel label) {
  switch (label) {
    case NodeLabel::Success: return "success";
    case NodeLabel::Failure: return "failure";
    case NodeLabel::Hub: return "hub";
    case NodeLabel::Intermediate: return "intermediate";
  }
  return "?";
}

std::optional<NodeLabel> node_label_from_string(const std::string& s) {
  if (s == "success") return NodeLabel::Success;
  if (s == "failure") return NodeLabel::Failure;
  if (s == "hub") return NodeLabel::Hub;
  if (s == "intermediate") return NodeLabel::Intermediate;
  return std::nullopt;
}

Node& CollectiveGraph::node_at(const std::string& key) {
  auto it = nodes_.find(key);
  if (it == nodes_.end()) throw std::out_of_range("unknown node key " + key);
  return it->second;
}

const Node& CollectiveGraph::node_at(const std::string& key) const {
  auto it = nodes_.find(key);
  if (it == nodes_.end()) throw std::out_of_range("unknown node key " + key);
  return it->second;
}

void CollectiveGraph::touch_node(const std::string& key, const codec::StateTensor& tensor) {
  auto [it, inserted] = nodes_.try_emplace(key);
  if (inserted) {
    it->second.tensor = tensor;
  } else if (!(it->second.tensor == tensor)) {
    throw std::runtime_error("tensor key collision on " + key);
  }
  it->second.visit_count += 1;
}

void CollectiveGraph::add_edge(const std::string& src, const std::string& dst, long count) {
  if (!nodes_.count(src) || !nodes_.count(dst)) {
    throw std::out_of_range("edge endpoint not in node table");
  }
  if (src == dst) throw std::invalid_argument("self loops are excluded");
  edges_[{src, dst}] += count;
}

void CollectiveGraph::add_trajectory(const abm::Trajectory& trajectory,
                                     const abm::WorldConfig& world, const CodecSettings& codec,
                                     const std::string& sim_id) {
  if (trajectory.snapshots.empty()) {
    throw std::invalid_argument("trajectory has no recorded snapshots");
  }
  std::vector<std::string> keys;
  std::vector<codec::StateTensor> tensors;
  keys.reserve(trajectory.snapshots.size());
  for (const auto& snapshot : trajectory.snapshots) {
    codec::StateTensor tensor = codec.encoding == codec::Encoding::Float
                                    ? codec::encode_float(snapshot, world, codec.max_agents)
                                    : codec::encode_onehot_tensor(snapshot, world);
    std::string key = codec::tensor_key(tensor);
    if (!keys.empty() && keys.back() == key) continue;  // collapse dwell
    keys.push_back(std::move(key));
    tensors.push_back(std::move(tensor));
  }

  int best = -1;
  double best_quality = -1.0;
  for (const auto& site : world.sites) {
    if (site.quality > best_quality) {
      best_quality = site.quality;
      best = site.id;
    }
  }

  TrajectoryRecord record;
  record.sim_id = sim_id;
  record.decided = trajectory.outcome.decided;
  record.chosen_site = trajectory.outcome.site;
  record.best_site = best;
  record.ticks = trajectory.ticks_elapsed;
  add_encoded_trajectory(keys, tensors, record);
}

void CollectiveGraph::add_encoded_trajectory(const std::vector<std::string>& keys,
                                             const std::vector<codec::StateTensor>& tensors,
                                             const TrajectoryRecord& record) {
  if (keys.empty()) throw std::invalid_argument("empty trajectory");
  if (keys.size() != tensors.size()) throw std::invalid_argument("keys/tensors size mismatch");
  std::vector<std::string> collapsed;
  collapsed.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!collapsed.empty() && collapsed.back() == keys[i]) continue;
    touch_node(keys[i], tensors[i]);
    collapsed.push_back(keys[i]);
  }
  for (std::size_t i = 1; i < collapsed.size(); ++i) {
    add_edge(collapsed[i - 1], collapsed[i]);
  }
  TrajectoryRecord stored = record;
  stored.keys = std::move(collapsed);
  trajectories_.push_back(std::move(stored));
}

void CollectiveGraph::merge(const CollectiveGraph& other) {
  for (const auto& [key, node] : other.nodes_) {
    auto [it, inserted] = nodes_.try_emplace(key);
    if (inserted) {
      it->second.tensor = node.tensor;
    } else if (!(it->second.tensor == node.tensor)) {
      throw std::runtime_error("tensor key collision on " + key);
    }
    it->second.visit_count += node.visit_count;
  }
  for (const auto& [edge, count] : other.edges_) edges_[edge] += count;
  trajectories_.insert(trajectories_.end(), other.trajectories_.begin(),
                       other.trajectories_.end());
}

std::vector<std::string> CollectiveGraph::node_order() const {
  std::vector<std::string> order;
  order.reserve(nodes_.size());
  for (const auto& [key, node] : nodes_) order.push_back(key);
  return order;
}

bool CollectiveGraph::nodes_same(const CollectiveGraph& other) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  auto it = nodes_.begin();
  auto jt = other.nodes_.begin();
  for (; it != nodes_.end(); ++it, ++jt) {
    if (it->first != jt->first || it->second.visit_count != jt->second.visit_count ||
        !(it->second.tensor == jt->second.tensor)) {
      return false;
    }
  }
  return true;
}

CollectiveGraph largest_weakly_connected_component(const CollectiveGraph& graph) {
  if (graph.nodes().empty()) throw std::invalid_argument("empty graph");

  std::map<std::string, std::vector<std::string>> undirected;
  for (const auto& [key, node] : graph.nodes()) undirected[key];
  for (const auto& [edge, count] : graph.edges()) {
    undirected[edge.first].push_back(edge.second);
    undirected[edge.second].push_back(edge.first);
  }

  std::set<std::string> seen;
  std::set<std::string> best_component;
  // Iterating nodes in ascending key order makes the tie break (smallest
  // key among equal-size components) automatic: the first one found wins.
  for (const auto& [start, adjacent] : undirected) {
    if (seen.count(start)) continue;
    std::set<std::string> component;
    std::queue<std::string> frontier;
    frontier.push(start);
    seen.insert(start);
    while (!frontier.empty()) {
      std::string key = frontier.front();
      frontier.pop();
      component.insert(key);
      for (const auto& next : undirected[key]) {
        if (seen.insert(next).second) frontier.push(next);
      }
    }
    if (component.size() > best_component.size()) best_component = std::move(component);
  }

  CollectiveGraph result;
  for (const auto& key : best_component) {
    const Node& node = graph.node_at(key);
    result.touch_node(key, node.tensor);
    result.node_at(key).visit_count = node.visit_count;
    result.node_at(key).label = node.label;
  }
  for (const auto& [edge, count] : graph.edges()) {
    if (best_component.count(edge.first) && best_component.count(edge.second)) {
      result.add_edge(edge.first, edge.second, count);
    }
  }
  for (const auto& record : graph.trajectories()) {
    bool inside = std::all_of(record.keys.begin(), record.keys.end(),
                              [&](const std::string& k) { return best_component.count(k) > 0; });
    if (inside) result.add_trajectory_record(record);
  }
  return result;
}

std::map<std::string, std::vector<std::pair<std::string, double>>> edge_probabilities(
    const CollectiveGraph& graph) {
  std::map<std::string, long> out_totals;
  for (const auto& [edge, count] : graph.edges()) out_totals[edge.first] += count;

  std::map<std::string, std::vector<std::pair<std::string, double>>> result;
  for (const auto& [key, node] : graph.nodes()) result[key];
  for (const auto& [edge, count] : graph.edges()) {
    result[edge.first].emplace_back(edge.second,
                                    static_cast<double>(count) /
                                        static_cast<double>(out_totals[edge.first]));
  }
  return result;
}

CollectiveGraph subgraph_sample(const abm::Trajectory& trajectory, const abm::WorldConfig& world,
                                const CodecSettings& codec, const std::string& sim_id) {
  CollectiveGraph graph;
  graph.add_trajectory(trajectory, world, codec, sim_id);
  return graph;
}

std::vector<std::vector<double>> adjacency_matrix(const CollectiveGraph& graph,
                                                  const std::vector<std::string>& ordering) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    if (!graph.nodes().count(ordering[i])) {
      throw std::out_of_range("ordering references unknown node " + ordering[i]);
    }
    if (!index.emplace(ordering[i], i).second) {
      throw std::invalid_argument("duplicate node in ordering");
    }
  }
  if (index.size() != graph.node_count()) {
    throw std::invalid_argument("ordering must cover every node exactly once");
  }
  std::vector<std::vector<double>> adj(ordering.size(),
                                       std::vector<double>(ordering.size(), 0.0));
  for (const auto& [edge, count] : graph.edges()) {
    std::size_t i = index.at(edge.first);
    std::size_t j = index.at(edge.second);
    adj[i][j] = 1.0;
    adj[j][i] = 1.0;
  }
  return adj;
}

}  // namespace bestofn::graph
