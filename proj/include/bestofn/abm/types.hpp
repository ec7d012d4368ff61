#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/core/vec2.hpp"

namespace bestofn::abm {

/// The seven states of the per-agent Markov machine.
enum class AgentState : int {
  Observe = 0,
  Explore,
  Assess,
  Recruit,
  TravelHubObserve,
  TravelHubRecruit,
  TravelSite,
};

constexpr int kNumAgentStates = 7;

const char* to_string(AgentState s);
std::optional<AgentState> agent_state_from_string(const std::string& s);

/// True for states that reference a favored site (A, R, T_HR, T_S).
inline bool is_site_oriented(AgentState s) {
  return s == AgentState::Assess || s == AgentState::Recruit ||
         s == AgentState::TravelHubRecruit || s == AgentState::TravelSite;
}

inline bool is_travel(AgentState s) {
  return s == AgentState::TravelHubObserve || s == AgentState::TravelHubRecruit ||
         s == AgentState::TravelSite;
}

struct Site {
  int id = 0;
  Vec2 position;
  double quality = 1.0;  // in (0, 1]
};

struct Agent {
  int id = 0;
  AgentState state = AgentState::Observe;
  Vec2 position;
  double heading = 0.0;  // radians, meaningful only while exploring
  std::optional<int> favored_site;
  int reassess_remaining = 0;
  std::optional<Vec2> target;

  bool operator==(const Agent& o) const = default;
};

using Snapshot = std::vector<Agent>;

struct WorldConfig {
  Vec2 hub{0.0, 0.0};
  double max_distance = 1000.0;
  std::vector<Site> sites;
  int num_agents = 10;
  double quorum_fraction = 0.5;
  std::optional<int> quorum_count;  // absolute override of the tau*K rule
  long max_ticks = 1000;
  double agent_speed = 2.0;
  double site_radius = 10.0;
  std::uint64_t rng_seed = 0;

  const Site& site(int id) const;
  /// Smallest integer strictly greater than quorum_fraction * num_agents,
  /// unless an absolute count is configured.
  int quorum_threshold() const;
};

/// How an exploring agent discovers a site.
enum class DiscoveryMode {
  /// Bernoulli(q) whenever the agent is inside the radius of a site.
  QualityAtSite,
  /// Deterministic: adopt the nearest site when reaching max_distance/2.
  HalfRangeDeterministic,
};

/// How long a recruitment bout continues each tick.
enum class RecruitCurve {
  Logistic,     // x(q) = 2 / (2 + e^{-7q})
  MeanBoutSixQ, // x(q) = max(0, 1 - 1/(6q)), mean bout length 6q ticks
};

struct TransitionParams {
  double p_observe_explore = 0.01;  // p1
  double p_reassess = 0.99;         // p2
  double p_explore_return = 0.02;   // p3
  double p_assess_done = 0.1;       // p4
  double recruit_pull_rate = 0.1;   // per-recruiter Bernoulli rate for p_r
  double gamma_exponent = 0.5;
  double reassess_scale = 3.0;
  RecruitCurve recruit_curve = RecruitCurve::Logistic;
  DiscoveryMode discovery = DiscoveryMode::QualityAtSite;
};

struct Outcome {
  bool decided = false;
  int site = -1;

  static Outcome decided_for(int site) { return {true, site}; }
  static Outcome timed_out() { return {false, -1}; }
  bool operator==(const Outcome& o) const = default;
};

struct Trajectory {
  std::string initial_id;
  std::vector<Snapshot> snapshots;  // snapshots[t] is the state at tick t
  Outcome outcome;
  long ticks_elapsed = 0;
};

enum class InitialConditionKind {
  AllObserve,
  HalfExploreHalfObserve,
  NinetyObserveTenRecruitWorst,
  /// Uniform random state per agent with a position appropriate for it.
  RandomStates,
};

}  // namespace bestofn::abm
