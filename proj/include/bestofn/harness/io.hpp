#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bestofn/abm/types.hpp"
#include "bestofn/analysis/metrics.hpp"
#include "bestofn/graph/collective_graph.hpp"

namespace bestofn::harness {

/// Everything needed to rebuild tensors from a logged trial.
struct TrialMeta {
  std::string sim_id;
  std::uint64_t seed = 0;
  abm::WorldConfig world;
  int init_index = 0;
  int rep = 0;
  abm::Outcome outcome;
  long ticks_elapsed = 0;
};

void write_trajectory_jsonl(const abm::Trajectory& trajectory, const abm::WorldConfig& world,
                            const std::string& path);
abm::Trajectory read_trajectory_jsonl(const std::string& path);

void write_trial_meta(const TrialMeta& meta, const std::string& path);
TrialMeta read_trial_meta(const std::string& path);

void save_graph(const graph::CollectiveGraph& graph, codec::Encoding encoding,
                const std::string& path);
std::pair<graph::CollectiveGraph, codec::Encoding> load_graph(const std::string& path);

void write_metrics_csv(const std::vector<analysis::RunMetrics>& rows, const std::string& path);
std::vector<analysis::RunMetrics> read_metrics_csv(const std::string& path);

/// manifest.json at the artifact root: relative path -> fnv1a64 content
/// hash for every produced file. Add entries as stages complete.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path root);

  /// Hashes the file at root/relative and records it.
  void record(const std::string& relative);
  void save() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::filesystem::path root_;
  std::map<std::string, std::string> entries_;
};

std::string hash_file(const std::filesystem::path& path);

}  // namespace bestofn::harness
