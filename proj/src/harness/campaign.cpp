#include "bestofn/harness/campaign.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bestofn/analysis/success.hpp"
#include "bestofn/core/hash.hpp"
#include "bestofn/core/text.hpp"

namespace bestofn::harness {

namespace fs = std::filesystem;

std::string Cell::id() const {
  std::ostringstream out;
  out << "T" << runtime << "_d" << format_double(distance) << "_K" << num_agents << "_N"
      << num_sites << "_q" << quality_index;
  return out.str();
}

std::uint64_t Cell::hash() const {
  Fnv1a64 h;
  h.update_str(id());
  for (double q : qualities) h.update_double(q);
  return h.digest();
}

std::vector<std::vector<double>> sample_quality_vectors(const CampaignConfig& config,
                                                        int num_sites) {
  if (!config.fixed_qualities.empty()) {
    if (static_cast<int>(config.fixed_qualities.size()) != num_sites) {
      throw std::runtime_error("fixed qualities count does not match num_sites " +
                               std::to_string(num_sites));
    }
    return {config.fixed_qualities};
  }
  Rng rng(mix64(config.seed, 0x71a115ULL + static_cast<std::uint64_t>(num_sites)));
  std::vector<std::vector<double>> vectors;
  int guard = 0;
  while (static_cast<int>(vectors.size()) < config.quality_vectors) {
    if (++guard > 100000) throw std::runtime_error("quality sampling failed to satisfy constraints");
    std::vector<double> qualities;
    for (int s = 0; s < num_sites; ++s) {
      qualities.push_back(rng.uniform(config.quality_min, 1.0));
    }
    bool ok = true;
    for (std::size_t a = 0; a < qualities.size() && ok; ++a) {
      if (qualities[a] <= config.quality_min) ok = false;
      for (std::size_t b = a + 1; b < qualities.size() && ok; ++b) {
        if (std::abs(qualities[a] - qualities[b]) >= config.quality_diff_max) ok = false;
      }
    }
    if (ok) vectors.push_back(std::move(qualities));
  }
  return vectors;
}

std::vector<Cell> enumerate_cells(const CampaignConfig& config) {
  std::vector<Cell> cells;
  for (int num_sites : config.site_counts) {
    const auto quality_vectors = sample_quality_vectors(config, num_sites);
    for (long runtime : config.runtimes) {
      for (double distance : config.site_distances) {
        for (int num_agents : config.agent_counts) {
          for (std::size_t qi = 0; qi < quality_vectors.size(); ++qi) {
            Cell cell;
            cell.runtime = runtime;
            cell.distance = distance;
            cell.num_agents = num_agents;
            cell.num_sites = num_sites;
            cell.quality_index = static_cast<int>(qi);
            cell.qualities = quality_vectors[qi];
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return cells;
}

std::uint64_t trial_seed(std::uint64_t base, const Cell& cell, int init_index, int rep) {
  return mix64(mix64(mix64(base, cell.hash()), static_cast<std::uint64_t>(init_index)),
               static_cast<std::uint64_t>(rep));
}

std::vector<abm::Snapshot> build_initial_pool(const abm::WorldConfig& world,
                                              const abm::TransitionParams& params,
                                              codec::Encoding encoding, int pool_size,
                                              std::uint64_t seed) {
  const abm::InitialConditionKind kinds[] = {
      abm::InitialConditionKind::AllObserve,
      abm::InitialConditionKind::HalfExploreHalfObserve,
      abm::InitialConditionKind::NinetyObserveTenRecruitWorst,
  };
  std::vector<abm::Snapshot> pooled;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < 3; ++k) {
    Rng init_rng(mix64(seed, 100 + k));
    const abm::Snapshot initial = abm::make_initial_condition(kinds[k], world, init_rng);
    const abm::Trajectory traj =
        abm::run_simulation(world, params, initial, mix64(seed, 200 + k));
    for (const auto& snapshot : traj.snapshots) {
      const auto tensor = encoding == codec::Encoding::Float
                              ? codec::encode_float(snapshot, world)
                              : codec::encode_onehot_tensor(snapshot, world);
      if (seen.insert(codec::tensor_key(tensor)).second) pooled.push_back(snapshot);
    }
  }
  if (static_cast<int>(pooled.size()) < pool_size) {
    throw std::runtime_error("only " + std::to_string(pooled.size()) +
                             " distinct snapshots available for an initial pool of " +
                             std::to_string(pool_size) + "; increase the pool runtime");
  }
  // Sample pool_size without replacement.
  Rng pick_rng(mix64(seed, 300));
  std::vector<abm::Snapshot> pool;
  std::vector<std::size_t> indices(pooled.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  for (int taken = 0; taken < pool_size; ++taken) {
    const int pick = pick_rng.uniform_int(static_cast<int>(indices.size()));
    pool.push_back(pooled[indices[static_cast<std::size_t>(pick)]]);
    indices.erase(indices.begin() + pick);
  }
  return pool;
}

abm::Snapshot rebind_snapshot(const abm::Snapshot& snapshot, const abm::WorldConfig& world) {
  abm::Snapshot out;
  out.reserve(snapshot.size());
  for (abm::Agent agent : snapshot) {
    if (agent.favored_site) {
      const auto& site = world.site(*agent.favored_site);
      switch (agent.state) {
        case abm::AgentState::Assess:
          agent.position = site.position;
          break;
        case abm::AgentState::Recruit:
          agent.position = world.hub;
          break;
        case abm::AgentState::TravelSite:
          agent.target = site.position;
          break;
        case abm::AgentState::TravelHubRecruit:
          agent.target = world.hub;
          break;
        default:
          break;
      }
    } else if (agent.state == abm::AgentState::TravelHubObserve) {
      agent.target = world.hub;
    }
    // Keep travellers and explorers inside the world radius.
    const double r = distance(agent.position, world.hub);
    if (r > world.max_distance) {
      agent.position = world.hub + (agent.position - world.hub) * (world.max_distance / r);
    }
    out.push_back(std::move(agent));
  }
  return out;
}

std::string TrialRef::sim_id() const {
  return cell.id() + "/init" + std::to_string(init_index) + "/rep" + std::to_string(rep);
}

std::string TrialRef::directory() const { return "cells/" + sim_id(); }

namespace {

struct PoolKey {
  int num_agents;
  int num_sites;
  bool operator<(const PoolKey& o) const {
    return num_agents != o.num_agents ? num_agents < o.num_agents : num_sites < o.num_sites;
  }
};

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config, const std::string& out_dir,
                            int workers) {
  const fs::path root(out_dir);
  fs::create_directories(root);
  write_campaign_config(config, (root / "config.echo.cfg").string());

  const abm::TransitionParams params = config.transition_params();
  const std::vector<Cell> cells = enumerate_cells(config);

  // One initial pool per (K, N), built on the first grid values. Pool
  // simulations always run 1000 ticks.
  std::map<PoolKey, std::vector<abm::Snapshot>> pools;
  for (const auto& cell : cells) {
    const PoolKey key{cell.num_agents, cell.num_sites};
    if (pools.count(key)) continue;
    const auto pool_qualities = sample_quality_vectors(config, cell.num_sites).front();
    const std::uint64_t pool_seed =
        mix64(config.seed, fnv1a64("pool" + std::to_string(cell.num_agents) + "_" +
                                   std::to_string(cell.num_sites)));
    abm::WorldConfig pool_world =
        config.world_for(cell.num_agents, cell.num_sites, config.site_distances.front(),
                         pool_qualities, 1000, pool_seed);
    pools[key] = build_initial_pool(pool_world, params, config.tensor_encoding,
                                    config.initial_pool_size, pool_seed);
  }

  std::vector<TrialRef> trials;
  for (const auto& cell : cells) {
    const int pool_size =
        static_cast<int>(pools.at(PoolKey{cell.num_agents, cell.num_sites}).size());
    for (int init = 0; init < pool_size; ++init) {
      for (int rep = 0; rep < config.repetitions; ++rep) {
        trials.push_back(TrialRef{cell, init, rep});
      }
    }
  }

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif

  std::vector<analysis::RunMetrics> metrics(trials.size());
  std::vector<std::string> failures(trials.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialRef& trial = trials[t];
    try {
      const std::uint64_t seed = trial_seed(config.seed, trial.cell, trial.init_index, trial.rep);
      abm::WorldConfig world = config.world_for(
          trial.cell.num_agents, trial.cell.num_sites, trial.cell.distance, trial.cell.qualities,
          trial.cell.runtime, mix64(config.seed, trial.cell.hash()));
      const auto& pool = pools.at(PoolKey{trial.cell.num_agents, trial.cell.num_sites});
      const abm::Snapshot initial =
          rebind_snapshot(pool[static_cast<std::size_t>(trial.init_index)], world);

      abm::SimOptions options;
      options.record_snapshots = config.log_trajectories;
      abm::Trajectory traj = abm::run_simulation(world, params, initial, seed, options);
      traj.initial_id = "init" + std::to_string(trial.init_index);

      analysis::RunMetrics row;
      row.sim_id = trial.sim_id();
      row.site_distance = trial.cell.distance;
      row.qualities = trial.cell.qualities;
      row.runtime_ticks = trial.cell.runtime;
      if (traj.outcome.decided) {
        row.chosen_site = traj.outcome.site;
        row.ticks_to_converge = traj.ticks_elapsed;
        row.success = analysis::success_metric(world.site(traj.outcome.site).quality,
                                               trial.cell.qualities);
      }
      metrics[t] = std::move(row);

      if (config.log_trajectories) {
        const fs::path dir = root / trial.directory();
        fs::create_directories(dir);
        write_trajectory_jsonl(traj, world, (dir / "trajectory.jsonl").string());
        TrialMeta meta;
        meta.sim_id = trial.sim_id();
        meta.seed = seed;
        meta.world = world;
        meta.init_index = trial.init_index;
        meta.rep = trial.rep;
        meta.outcome = traj.outcome;
        meta.ticks_elapsed = traj.ticks_elapsed;
        write_trial_meta(meta, (dir / "meta.json").string());
      }
    } catch (const std::exception& e) {
      failures[t] = e.what();
    }
  }

  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (!failures[t].empty()) {
      // Preserve what completed: the manifest below lists finished cells.
      Manifest manifest(root);
      for (std::size_t s = 0; s < t; ++s) {
        if (config.log_trajectories && failures[s].empty()) {
          manifest.record(trials[s].directory() + "/trajectory.jsonl");
          manifest.record(trials[s].directory() + "/meta.json");
        }
      }
      manifest.save();
      throw std::runtime_error("trial " + trials[t].sim_id() + " failed: " + failures[t]);
    }
  }

  write_metrics_csv(metrics, (root / "metrics.csv").string());

  Manifest manifest(root);
  manifest.record("config.echo.cfg");
  manifest.record("metrics.csv");
  if (config.log_trajectories) {
    for (const auto& trial : trials) {
      manifest.record(trial.directory() + "/trajectory.jsonl");
      manifest.record(trial.directory() + "/meta.json");
    }
  }
  manifest.save();

  CampaignResult result;
  result.trials = std::move(trials);
  result.metrics = std::move(metrics);
  return result;
}

}  // namespace bestofn::harness
