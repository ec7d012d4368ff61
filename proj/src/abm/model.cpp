#include "bestofn/abm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bestofn::abm {

const char* to_string(AgentState s) {
  switch (s) {
    case AgentState::Observe: return "O";
    case AgentState::Explore: return "E";
    case AgentState::Assess: return "A";
    case AgentState::Recruit: return "R";
    case AgentState::TravelHubObserve: return "T_HO";
    case AgentState::TravelHubRecruit: return "T_HR";
    case AgentState::TravelSite: return "T_S";
  }
  return "?";
}

std::optional<AgentState> agent_state_from_string(const std::string& s) {
  if (s == "O") return AgentState::Observe;
  if (s == "E") return AgentState::Explore;
  if (s == "A") return AgentState::Assess;
  if (s == "R") return AgentState::Recruit;
  if (s == "T_HO") return AgentState::TravelHubObserve;
  if (s == "T_HR") return AgentState::TravelHubRecruit;
  if (s == "T_S") return AgentState::TravelSite;
  return std::nullopt;
}

const Site& WorldConfig::site(int id) const {
  for (const auto& s : sites) {
    if (s.id == id) return s;
  }
  throw std::out_of_range("unknown site id " + std::to_string(id));
}

int WorldConfig::quorum_threshold() const {
  if (quorum_count) return *quorum_count;
  return static_cast<int>(std::floor(quorum_fraction * num_agents)) + 1;
}

double recruit_continue_prob(double quality) {
  if (quality < 0.0 || quality > 1.0) {
    throw std::domain_error("site quality must lie in [0, 1]");
  }
  return 2.0 / (2.0 + std::exp(-7.0 * quality));
}

double recruit_continue_prob(double quality, RecruitCurve curve) {
  if (curve == RecruitCurve::Logistic) return recruit_continue_prob(quality);
  if (quality < 0.0 || quality > 1.0) {
    throw std::domain_error("site quality must lie in [0, 1]");
  }
  if (quality <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - 1.0 / (6.0 * quality));
}

double reassess_gamma(double quality) {
  if (quality < 0.0) throw std::domain_error("site quality must be non-negative");
  return std::sqrt(quality);
}

int reassess_budget(double quality, const TransitionParams& params) {
  if (quality < 0.0) throw std::domain_error("site quality must be non-negative");
  if (quality == 0.0) return 0;
  double gamma = std::pow(quality, params.gamma_exponent);
  int budget = static_cast<int>(std::lround(params.reassess_scale * gamma));
  return std::max(1, budget);
}

RecruiterCensus count_recruiters_at_hub(const Snapshot& colony, const WorldConfig& world) {
  RecruiterCensus census;
  for (const auto& agent : colony) {
    if (agent.state != AgentState::Recruit || !agent.favored_site) continue;
    if (distance(agent.position, world.hub) > world.site_radius) continue;
    census.by_site[*agent.favored_site] += 1;
    census.total += 1;
  }
  return census;
}

std::optional<int> sample_recruitment_one(const RecruiterCensus& census, double rate, Rng& rng) {
  if (census.total <= 0) return std::nullopt;
  int hits = 0;
  for (int i = 0; i < census.total; ++i) {
    if (rng.bernoulli(rate)) ++hits;
  }
  if (hits < 1) return std::nullopt;
  // Site choice proportional to per-site recruiter counts, ascending id.
  double u = rng.uniform01() * census.total;
  double cumulative = 0.0;
  int chosen = census.by_site.rbegin()->first;
  for (const auto& [site_id, count] : census.by_site) {
    cumulative += count;
    if (u < cumulative) {
      chosen = site_id;
      break;
    }
  }
  return chosen;
}

std::vector<std::optional<int>> sample_recruitment(int observer_count,
                                                   const std::map<int, int>& recruiters_by_site,
                                                   double rate, Rng& rng) {
  RecruiterCensus census;
  for (const auto& [site_id, count] : recruiters_by_site) {
    if (count < 0) throw std::invalid_argument("recruiter counts must be non-negative");
    if (count > 0) {
      census.by_site[site_id] = count;
      census.total += count;
    }
  }
  std::vector<std::optional<int>> out;
  out.reserve(static_cast<std::size_t>(observer_count));
  for (int i = 0; i < observer_count; ++i) {
    out.push_back(sample_recruitment_one(census, rate, rng));
  }
  return out;
}

void validate_agent(const Agent& agent, const WorldConfig& world) {
  const bool favored = agent.favored_site.has_value();
  if (favored != is_site_oriented(agent.state)) {
    throw std::invalid_argument("agent " + std::to_string(agent.id) +
                                ": favored_site must be present exactly in states A/R/T_HR/T_S");
  }
  if (agent.reassess_remaining > 0 && !favored) {
    throw std::invalid_argument("agent " + std::to_string(agent.id) +
                                ": reassess budget without a favored site");
  }
  if (agent.reassess_remaining < 0) {
    throw std::invalid_argument("agent " + std::to_string(agent.id) + ": negative reassess budget");
  }
  if (distance(agent.position, world.hub) > world.max_distance + 1e-9) {
    throw std::invalid_argument("agent " + std::to_string(agent.id) + ": outside the world radius");
  }
  if (favored) world.site(*agent.favored_site);  // throws on a dangling id
  if (is_travel(agent.state) && !agent.target) {
    throw std::invalid_argument("agent " + std::to_string(agent.id) + ": travel state without target");
  }
}

namespace {

// Specular reflection at the world boundary circle. Folds the overshoot
// back inside and mirrors the heading across the boundary normal.
void reflect_at_boundary(Vec2& pos, double& heading, const WorldConfig& world) {
  Vec2 rel = pos - world.hub;
  double r = rel.norm();
  if (r <= world.max_distance || r == 0.0) return;
  double folded = 2.0 * world.max_distance - r;
  folded = std::max(0.0, std::min(folded, world.max_distance));
  Vec2 normal = rel * (1.0 / r);
  pos = world.hub + normal * folded;
  Vec2 dir{std::cos(heading), std::sin(heading)};
  double along = dir.dot(normal);
  Vec2 reflected = dir - normal * (2.0 * along);
  heading = std::atan2(reflected.y, reflected.x);
}

// Nearest site within the detection radius, lowest id on ties.
std::optional<int> site_in_range(const Vec2& pos, const WorldConfig& world) {
  std::optional<int> best;
  double best_dist = world.site_radius;
  for (const auto& s : world.sites) {
    double d = distance(pos, s.position);
    if (d < best_dist || (d == best_dist && (!best || s.id < *best))) {
      best = s.id;
      best_dist = d;
    }
  }
  return best;
}

int nearest_site(const Vec2& pos, const WorldConfig& world) {
  int best = world.sites.front().id;
  double best_dist = distance(pos, world.sites.front().position);
  for (const auto& s : world.sites) {
    double d = distance(pos, s.position);
    if (d < best_dist) {
      best = s.id;
      best_dist = d;
    }
  }
  return best;
}

void adopt_site(Agent& agent, const Site& site, const TransitionParams& params) {
  agent.favored_site = site.id;
  agent.reassess_remaining = reassess_budget(site.quality, params);
}

void abandon_site(Agent& agent) {
  agent.favored_site.reset();
  agent.reassess_remaining = 0;
  agent.target.reset();
  agent.state = AgentState::Observe;
}

Agent step_observe(Agent next, const RecruiterCensus& census, const WorldConfig& world,
                   const TransitionParams& params, Rng& rng) {
  if (auto site_id = sample_recruitment_one(census, params.recruit_pull_rate, rng)) {
    const Site& site = world.site(*site_id);
    adopt_site(next, site, params);
    next.state = AgentState::TravelSite;
    next.target = site.position;
    return next;
  }
  if (rng.bernoulli(params.p_observe_explore)) {
    next.state = AgentState::Explore;
    next.heading = rng.uniform(-M_PI, M_PI);
  }
  return next;
}

Agent step_explore(Agent next, const WorldConfig& world, const TransitionParams& params,
                   Rng& rng) {
  const Vec2 previous = next.position;
  next.heading += rng.uniform(-0.3, 0.3);
  next.position = next.position + Vec2{std::cos(next.heading), std::sin(next.heading)} * world.agent_speed;
  reflect_at_boundary(next.position, next.heading, world);

  if (params.discovery == DiscoveryMode::HalfRangeDeterministic) {
    if (distance(next.position, world.hub) >= 0.5 * world.max_distance) {
      const Site& site = world.site(nearest_site(next.position, world));
      adopt_site(next, site, params);
      next.state = AgentState::Assess;
      next.position = site.position;
      return next;
    }
  } else if (auto site_id = site_in_range(next.position, world)) {
    const Site& site = world.site(*site_id);
    // The discovery coin flips once per crossing into the site's radius;
    // lingering inside does not re-draw it.
    const bool entered = distance(previous, site.position) > world.site_radius;
    if (entered && rng.bernoulli(site.quality)) {
      adopt_site(next, site, params);
      next.state = AgentState::Assess;
      next.position = site.position;
    }
    return next;  // at a site: the give-up coin is not in play
  }

  if (rng.bernoulli(params.p_explore_return)) {
    next.state = AgentState::TravelHubObserve;
    next.target = world.hub;
  }
  return next;
}

Agent step_assess(Agent next, const Vec2& hub, const TransitionParams& params, Rng& rng) {
  if (rng.bernoulli(params.p_assess_done)) {
    next.state = AgentState::TravelHubRecruit;
    next.target = hub;
  }
  return next;
}

Agent step_recruit(Agent next, const WorldConfig& world, const TransitionParams& params, Rng& rng) {
  const Site& site = world.site(*next.favored_site);
  if (rng.bernoulli(recruit_continue_prob(site.quality, params.recruit_curve))) {
    return next;  // bout continues
  }
  if (next.reassess_remaining > 0) {
    if (rng.bernoulli(params.p_reassess)) {
      next.reassess_remaining -= 1;
      next.state = AgentState::TravelSite;
      next.target = site.position;
      return next;
    }
    abandon_site(next);
    return next;
  }
  abandon_site(next);
  return next;
}

Agent step_travel(Agent next, const WorldConfig& world) {
  const Vec2 dest = *next.target;
  const double d = distance(next.position, dest);
  if (d <= world.agent_speed) {
    next.position = dest;
    next.target.reset();
    switch (next.state) {
      case AgentState::TravelSite: next.state = AgentState::Assess; break;
      case AgentState::TravelHubRecruit: next.state = AgentState::Recruit; break;
      case AgentState::TravelHubObserve: next.state = AgentState::Observe; break;
      default: break;
    }
    return next;
  }
  next.position = next.position + (dest - next.position) * (world.agent_speed / d);
  return next;
}

}  // namespace

Agent step_agent(const Agent& agent, const RecruiterCensus& census, const WorldConfig& world,
                 const TransitionParams& params, Rng& rng) {
  validate_agent(agent, world);
  Agent next = agent;
  switch (agent.state) {
    case AgentState::Observe: return step_observe(std::move(next), census, world, params, rng);
    case AgentState::Explore: return step_explore(std::move(next), world, params, rng);
    case AgentState::Assess: return step_assess(std::move(next), world.hub, params, rng);
    case AgentState::Recruit: return step_recruit(std::move(next), world, params, rng);
    case AgentState::TravelSite:
    case AgentState::TravelHubRecruit:
    case AgentState::TravelHubObserve: return step_travel(std::move(next), world);
  }
  throw std::logic_error("unreachable agent state");
}

Agent step_agent(const Agent& agent, const Snapshot& colony, const WorldConfig& world,
                 const TransitionParams& params, Rng& rng) {
  return step_agent(agent, count_recruiters_at_hub(colony, world), world, params, rng);
}

std::optional<int> check_quorum(const Snapshot& colony, const WorldConfig& world) {
  std::map<int, int> counts;
  for (const auto& agent : colony) {
    if (agent.state != AgentState::Recruit || !agent.favored_site) continue;
    if (distance(agent.position, world.hub) > world.site_radius) continue;
    counts[*agent.favored_site] += 1;
  }
  const int threshold = world.quorum_threshold();
  for (const auto& [site_id, count] : counts) {
    if (count >= threshold) return site_id;
  }
  return std::nullopt;
}

}  // namespace bestofn::abm
