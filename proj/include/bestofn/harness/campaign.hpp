#pragma once

#include <string>
#include <vector>

#include "bestofn/harness/config.hpp"
#include "bestofn/harness/io.hpp"

namespace bestofn::harness {

/// One point of the parameter grid.
struct Cell {
  long runtime = 0;
  double distance = 0.0;
  int num_agents = 0;
  int num_sites = 0;
  int quality_index = 0;
  std::vector<double> qualities;

  std::string id() const;
  std::uint64_t hash() const;
};

std::vector<Cell> enumerate_cells(const CampaignConfig& config);

/// Rejection-samples `count` quality vectors satisfying the pairwise
/// constraints (all diffs < quality_diff_max, min > quality_min), seeded
/// per site count.
std::vector<std::vector<double>> sample_quality_vectors(const CampaignConfig& config,
                                                        int num_sites);

/// Pool of initial colony states: one simulation per seed condition, all
/// visited snapshots pooled, deduplicated by canonical tensor, and
/// `pool_size` of them sampled without replacement. Throws when fewer
/// distinct snapshots exist.
std::vector<abm::Snapshot> build_initial_pool(const abm::WorldConfig& world,
                                              const abm::TransitionParams& params,
                                              codec::Encoding encoding, int pool_size,
                                              std::uint64_t seed);

/// Rebinds a pool snapshot to a (possibly different) world: site-bound
/// positions and targets move to the new site locations, explorers clamp
/// to the world radius.
abm::Snapshot rebind_snapshot(const abm::Snapshot& snapshot, const abm::WorldConfig& world);

/// Deterministic per-trial seed from (base seed, cell, initial condition,
/// repetition); adding grid cells never changes existing trials.
std::uint64_t trial_seed(std::uint64_t base, const Cell& cell, int init_index, int rep);

struct TrialRef {
  Cell cell;
  int init_index = 0;
  int rep = 0;

  std::string sim_id() const;
  std::string directory() const;  // relative to the campaign root
};

struct CampaignResult {
  std::vector<TrialRef> trials;
  std::vector<analysis::RunMetrics> metrics;
};

/// Runs the full grid: repetitions x initial conditions x cells, in
/// parallel over trials up to `workers`. Writes per-trial trajectory logs
/// (when enabled), metrics.csv, the resolved config echo, and the
/// manifest under `out_dir`.
CampaignResult run_campaign(const CampaignConfig& config, const std::string& out_dir,
                            int workers = 0);

}  // namespace bestofn::harness
