#include "bestofn/abm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bestofn::abm {

void validate_colony(const Snapshot& colony, const WorldConfig& world) {
  if (static_cast<int>(colony.size()) != world.num_agents) {
    throw std::invalid_argument("colony must have exactly " + std::to_string(world.num_agents) +
                                " agents, got " + std::to_string(colony.size()));
  }
  std::set<int> ids;
  for (const auto& agent : colony) {
    validate_agent(agent, world);
    if (!ids.insert(agent.id).second) {
      throw std::invalid_argument("duplicate agent id " + std::to_string(agent.id));
    }
  }
}

Trajectory run_simulation(const WorldConfig& world, const TransitionParams& params,
                          const Snapshot& initial, std::uint64_t seed,
                          const SimOptions& options) {
  validate_colony(initial, world);

  Rng rng(seed);
  Trajectory traj;
  Snapshot current = initial;
  if (options.record_snapshots) traj.snapshots.push_back(current);

  if (auto site = check_quorum(current, world)) {
    traj.outcome = Outcome::decided_for(*site);
    traj.ticks_elapsed = 0;
    return traj;
  }

  for (long tick = 1; tick <= world.max_ticks; ++tick) {
    const RecruiterCensus census = count_recruiters_at_hub(current, world);
    Snapshot next;
    next.reserve(current.size());
    for (const auto& agent : current) {
      next.push_back(step_agent(agent, census, world, params, rng));
    }
    current = std::move(next);
    if (options.record_snapshots) traj.snapshots.push_back(current);
    traj.ticks_elapsed = tick;
    if (auto site = check_quorum(current, world)) {
      traj.outcome = Outcome::decided_for(*site);
      return traj;
    }
  }
  traj.outcome = Outcome::timed_out();
  traj.ticks_elapsed = world.max_ticks;
  return traj;
}

const char* to_string(InitialConditionKind kind) {
  switch (kind) {
    case InitialConditionKind::AllObserve: return "all_observe";
    case InitialConditionKind::HalfExploreHalfObserve: return "half_explore_half_observe";
    case InitialConditionKind::NinetyObserveTenRecruitWorst: return "ninety_observe_ten_recruit_worst";
    case InitialConditionKind::RandomStates: return "random_states";
  }
  return "?";
}

namespace {

Agent observer_at_hub(int id, const WorldConfig& world) {
  Agent a;
  a.id = id;
  a.state = AgentState::Observe;
  a.position = world.hub;
  return a;
}

Vec2 random_point_in_disk(double radius, const WorldConfig& world, Rng& rng) {
  double r = radius * std::sqrt(rng.uniform01());
  double theta = rng.uniform(0.0, 2.0 * M_PI);
  return world.hub + Vec2{r * std::cos(theta), r * std::sin(theta)};
}

const Site& worst_site(const WorldConfig& world) {
  if (world.sites.empty()) throw std::invalid_argument("no sites defined");
  const Site* worst = &world.sites.front();
  for (const auto& s : world.sites) {
    if (s.quality < worst->quality || (s.quality == worst->quality && s.id < worst->id)) {
      worst = &s;
    }
  }
  return *worst;
}

Agent random_state_agent(int id, const WorldConfig& world, const TransitionParams& params,
                         Rng& rng) {
  Agent a;
  a.id = id;
  a.state = static_cast<AgentState>(rng.uniform_int(kNumAgentStates));
  const double explore_radius = params.discovery == DiscoveryMode::HalfRangeDeterministic
                                    ? 0.5 * world.max_distance
                                    : world.max_distance;
  switch (a.state) {
    case AgentState::Observe:
      a.position = world.hub;
      break;
    case AgentState::Explore:
      a.position = random_point_in_disk(explore_radius * 0.95, world, rng);
      a.heading = rng.uniform(-M_PI, M_PI);
      break;
    case AgentState::Assess: {
      const Site& s = world.sites[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(world.sites.size())))];
      a.favored_site = s.id;
      a.reassess_remaining = reassess_budget(s.quality, params);
      a.position = s.position;
      break;
    }
    case AgentState::Recruit: {
      const Site& s = world.sites[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(world.sites.size())))];
      a.favored_site = s.id;
      a.reassess_remaining = reassess_budget(s.quality, params);
      a.position = world.hub;
      break;
    }
    case AgentState::TravelSite: {
      const Site& s = world.sites[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(world.sites.size())))];
      a.favored_site = s.id;
      a.reassess_remaining = reassess_budget(s.quality, params);
      double t = rng.uniform01();
      a.position = world.hub + (s.position - world.hub) * t;
      a.target = s.position;
      break;
    }
    case AgentState::TravelHubRecruit: {
      const Site& s = world.sites[static_cast<std::size_t>(rng.uniform_int(
          static_cast<int>(world.sites.size())))];
      a.favored_site = s.id;
      a.reassess_remaining = reassess_budget(s.quality, params);
      double t = rng.uniform01();
      a.position = s.position + (world.hub - s.position) * t;
      a.target = world.hub;
      break;
    }
    case AgentState::TravelHubObserve: {
      a.position = random_point_in_disk(explore_radius * 0.95, world, rng);
      a.target = world.hub;
      break;
    }
  }
  return a;
}

}  // namespace

Snapshot make_initial_condition(InitialConditionKind kind, const WorldConfig& world, Rng& rng) {
  const int K = world.num_agents;
  Snapshot colony;
  colony.reserve(static_cast<std::size_t>(K));
  switch (kind) {
    case InitialConditionKind::AllObserve: {
      for (int i = 0; i < K; ++i) colony.push_back(observer_at_hub(i, world));
      break;
    }
    case InitialConditionKind::HalfExploreHalfObserve: {
      const int explorers = K / 2;
      for (int i = 0; i < K; ++i) {
        if (i < explorers) {
          Agent a;
          a.id = i;
          a.state = AgentState::Explore;
          a.position = random_point_in_disk(world.max_distance, world, rng);
          a.heading = rng.uniform(-M_PI, M_PI);
          colony.push_back(a);
        } else {
          colony.push_back(observer_at_hub(i, world));
        }
      }
      break;
    }
    case InitialConditionKind::NinetyObserveTenRecruitWorst: {
      const Site& worst = worst_site(world);
      TransitionParams budget_params;  // default gamma scaling for the seed recruiters
      const int recruiters = static_cast<int>(std::lround(0.1 * K));
      for (int i = 0; i < K; ++i) {
        if (i < recruiters) {
          Agent a;
          a.id = i;
          a.state = AgentState::Recruit;
          a.position = world.hub;
          a.favored_site = worst.id;
          a.reassess_remaining = reassess_budget(worst.quality, budget_params);
          colony.push_back(a);
        } else {
          colony.push_back(observer_at_hub(i, world));
        }
      }
      break;
    }
    case InitialConditionKind::RandomStates: {
      if (world.sites.empty()) throw std::invalid_argument("no sites defined");
      TransitionParams params;
      for (int i = 0; i < K; ++i) colony.push_back(random_state_agent(i, world, params, rng));
      break;
    }
  }
  return colony;
}

std::vector<Site> place_sites(int num_sites, double site_distance,
                              const std::vector<double>& qualities, Rng& rng) {
  if (static_cast<int>(qualities.size()) != num_sites) {
    throw std::invalid_argument("need one quality per site");
  }
  const double rotation = rng.uniform(0.0, 2.0 * M_PI);
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(num_sites));
  for (int i = 0; i < num_sites; ++i) {
    const double angle = rotation + 2.0 * M_PI * i / num_sites;
    Site s;
    s.id = i;
    s.position = Vec2{site_distance * std::cos(angle), site_distance * std::sin(angle)};
    s.quality = qualities[static_cast<std::size_t>(i)];
    if (s.quality <= 0.0 || s.quality > 1.0) {
      throw std::invalid_argument("site quality must lie in (0, 1]");
    }
    sites.push_back(s);
  }
  return sites;
}

WorldConfig make_world(int num_agents, int num_sites, double site_distance,
                       const std::vector<double>& qualities, long max_ticks,
                       std::uint64_t placement_seed) {
  WorldConfig world;
  world.num_agents = num_agents;
  world.max_ticks = max_ticks;
  world.rng_seed = placement_seed;
  Rng rng(placement_seed);
  world.sites = place_sites(num_sites, site_distance, qualities, rng);
  return world;
}

Experiment1Preset experiment1_preset(long max_ticks, std::uint64_t placement_seed) {
  Experiment1Preset preset;
  preset.world = make_world(10, 2, 250.0, {1.0, 0.5}, max_ticks, placement_seed);
  preset.world.quorum_count = 3;

  // Dwell-time means converted to per-tick rates (1 tick = 1 second):
  // Observe 8s, Assess 3s, recruit bout 6q ticks, pull 1/40 per recruiter.
  preset.params.p_observe_explore = 1.0 / 8.0;
  preset.params.p_assess_done = 1.0 / 3.0;
  preset.params.recruit_pull_rate = 1.0 / 40.0;
  preset.params.recruit_curve = RecruitCurve::MeanBoutSixQ;
  preset.params.discovery = DiscoveryMode::HalfRangeDeterministic;
  preset.params.p_explore_return = 0.0;  // exploration ends only by discovery
  return preset;
}

}  // namespace bestofn::abm
