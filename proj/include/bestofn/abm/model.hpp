#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bestofn/abm/types.hpp"
#include "bestofn/core/rng.hpp"

namespace bestofn::abm {

/// Recruitment-bout continuation probability x(q) = 2 / (2 + e^{-7q}).
/// Strictly increasing, range (2/3, 1) on [0, 1].
double recruit_continue_prob(double quality);

/// x(q) under the fixed-mean-bout curve: max(0, 1 - 1/(6q)).
double recruit_continue_prob(double quality, RecruitCurve curve);

/// gamma(q) = q^0.5.
double reassess_gamma(double quality);

/// Reassessment trip budget: round(scale * q^exponent), floored at 1 for q > 0.
int reassess_budget(double quality, const TransitionParams& params);

/// Recruiter counts visible at the hub, keyed by site id.
struct RecruiterCensus {
  std::map<int, int> by_site;
  int total = 0;
};

RecruiterCensus count_recruiters_at_hub(const Snapshot& colony, const WorldConfig& world);

/// One observer's recruitment outcome: p_r ~ binomial(total, rate); the
/// observer is pulled iff p_r >= 1, to a site chosen proportionally to
/// its recruiter count. Returns the chosen site, or nullopt.
std::optional<int> sample_recruitment_one(const RecruiterCensus& census, double rate, Rng& rng);

/// Batched form: one independent draw per observer.
std::vector<std::optional<int>> sample_recruitment(int observer_count,
                                                   const std::map<int, int>& recruiters_by_site,
                                                   double rate, Rng& rng);

/// Advances one agent by one tick against the previous-tick colony snapshot.
/// Only the returned agent changes; the snapshot is read-only.
Agent step_agent(const Agent& agent, const Snapshot& colony, const WorldConfig& world,
                 const TransitionParams& params, Rng& rng);

/// Variant taking a precomputed census (the simulation loop computes it
/// once per tick instead of once per agent).
Agent step_agent(const Agent& agent, const RecruiterCensus& census, const WorldConfig& world,
                 const TransitionParams& params, Rng& rng);

/// Site whose quorum predicate holds: at least quorum_threshold() agents
/// in Recruit for that site within site_radius of the hub. Lowest site id
/// wins if several qualify.
std::optional<int> check_quorum(const Snapshot& colony, const WorldConfig& world);

/// Throws std::invalid_argument when an agent record violates its invariants.
void validate_agent(const Agent& agent, const WorldConfig& world);

}  // namespace bestofn::abm
