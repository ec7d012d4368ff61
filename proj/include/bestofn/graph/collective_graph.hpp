#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/abm/types.hpp"
#include "bestofn/codec/tensor.hpp"

namespace bestofn::graph {

enum class NodeLabel { Success, Failure, Hub, Intermediate };

const char* to_string(NodeLabel label);
std::optional<NodeLabel> node_label_from_string(const std::string& s);

struct Node {
  codec::StateTensor tensor;
  long visit_count = 0;
  std::optional<NodeLabel> label;
};

/// One simulation's walk through the graph: collapsed node-key sequence
/// plus its outcome and the trial's best available site.
struct TrajectoryRecord {
  std::string sim_id;
  std::vector<std::string> keys;
  bool decided = false;
  int chosen_site = -1;
  int best_site = -1;
  long ticks = 0;
};

struct CodecSettings {
  codec::Encoding encoding = codec::Encoding::Float;
  int max_agents = codec::kMaxAgents;
};

/// Nodes are unique collective-state tensors, directed edges are observed
/// tick-to-tick transitions between distinct tensors, both with counts.
/// Consecutive identical tensors collapse, so there are no self loops.
class CollectiveGraph {
 public:
  using EdgeKey = std::pair<std::string, std::string>;

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<EdgeKey, long>& edges() const { return edges_; }
  const std::vector<TrajectoryRecord>& trajectories() const { return trajectories_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  Node& node_at(const std::string& key);
  const Node& node_at(const std::string& key) const;

  /// Inserts a node (or bumps its visit count). Detects key collisions
  /// between distinct tensors and throws.
  void touch_node(const std::string& key, const codec::StateTensor& tensor);
  void add_edge(const std::string& src, const std::string& dst, long count = 1);

  void add_trajectory(const abm::Trajectory& trajectory, const abm::WorldConfig& world,
                      const CodecSettings& codec, const std::string& sim_id);

  /// Adds a pre-encoded key/tensor sequence (still collapses repeats).
  void add_encoded_trajectory(const std::vector<std::string>& keys,
                              const std::vector<codec::StateTensor>& tensors,
                              const TrajectoryRecord& record);

  /// Registry-only insert used when rebuilding graphs from files.
  void add_trajectory_record(TrajectoryRecord record) {
    trajectories_.push_back(std::move(record));
  }

  /// Merges another graph into this one, summing counts.
  void merge(const CollectiveGraph& other);

  /// Ascending node keys; the stable export ordering.
  std::vector<std::string> node_order() const;

  bool operator==(const CollectiveGraph& other) const {
    return nodes_same(other) && edges_ == other.edges_;
  }

 private:
  bool nodes_same(const CollectiveGraph& other) const;

  std::map<std::string, Node> nodes_;
  std::map<EdgeKey, long> edges_;
  std::vector<TrajectoryRecord> trajectories_;
};

/// Subgraph induced by the largest node set connected when edge direction
/// is ignored; ties go to the component containing the smallest key.
/// Trajectory records are kept iff all their nodes survive.
CollectiveGraph largest_weakly_connected_component(const CollectiveGraph& graph);

/// Per-source transition distribution, count(src,dst) / sum over dst.
std::map<std::string, std::vector<std::pair<std::string, double>>> edge_probabilities(
    const CollectiveGraph& graph);

/// Graph of exactly one simulation, the inductive training unit.
CollectiveGraph subgraph_sample(const abm::Trajectory& trajectory, const abm::WorldConfig& world,
                                const CodecSettings& codec, const std::string& sim_id);

/// Symmetric 0/1 dense adjacency (an edge in either direction counts),
/// zero diagonal, in the given node ordering.
std::vector<std::vector<double>> adjacency_matrix(const CollectiveGraph& graph,
                                                  const std::vector<std::string>& ordering);

}  // namespace bestofn::graph
