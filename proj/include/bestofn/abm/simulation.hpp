#pragma once

#include <cstdint>
#include <string>

#include "bestofn/abm/model.hpp"
#include "bestofn/abm/types.hpp"

namespace bestofn::abm {

struct SimOptions {
  bool record_snapshots = true;
};

/// Runs the colony until quorum or max_ticks. All agents advance
/// synchronously from the previous tick's snapshot, in ascending id order,
/// from a single seeded stream; identical (inputs, seed) give bit-identical
/// trajectories. Quorum is also checked on the initial state.
Trajectory run_simulation(const WorldConfig& world, const TransitionParams& params,
                          const Snapshot& initial, std::uint64_t seed,
                          const SimOptions& options = {});

/// Validates a whole colony snapshot against the world.
void validate_colony(const Snapshot& colony, const WorldConfig& world);

Snapshot make_initial_condition(InitialConditionKind kind, const WorldConfig& world, Rng& rng);

const char* to_string(InitialConditionKind kind);

/// Places N sites evenly spaced in angle at the given distance, with a
/// seeded random global rotation.
std::vector<Site> place_sites(int num_sites, double site_distance,
                              const std::vector<double>& qualities, Rng& rng);

/// Campaign-grade world: Table-style parameter defaults with placed sites.
WorldConfig make_world(int num_agents, int num_sites, double site_distance,
                       const std::vector<double>& qualities, long max_ticks,
                       std::uint64_t placement_seed);

/// The small two-site reference setup: qualities 1.0 / 0.5, sites at
/// max_distance/4, 10 agents, absolute quorum of 3, deterministic
/// half-range discovery and mean-bout recruiting.
struct Experiment1Preset {
  WorldConfig world;
  TransitionParams params;
};
Experiment1Preset experiment1_preset(long max_ticks = 10000, std::uint64_t placement_seed = 0);

}  // namespace bestofn::abm
