#include "bestofn/harness/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "bestofn/core/text.hpp"

namespace bestofn::harness {

abm::TransitionParams CampaignConfig::transition_params() const {
  abm::TransitionParams params;
  params.p_observe_explore = p1;
  params.p_reassess = p2;
  params.p_explore_return = p3;
  params.p_assess_done = p4;
  params.recruit_pull_rate = p_r;
  params.gamma_exponent = gamma_exponent;
  params.reassess_scale = reassess_scale;
  params.recruit_curve = recruit_curve;
  params.discovery = discovery;
  return params;
}

abm::WorldConfig CampaignConfig::world_for(int num_agents, int num_sites, double distance,
                                           const std::vector<double>& qualities, long max_ticks,
                                           std::uint64_t placement_seed) const {
  abm::WorldConfig world = abm::make_world(num_agents, num_sites, distance, qualities, max_ticks,
                                           placement_seed);
  world.max_distance = max_distance;
  world.agent_speed = agent_speed;
  world.site_radius = site_radius;
  world.quorum_fraction = tau;
  world.quorum_count = quorum_count;
  return world;
}

namespace {

template <typename T>
T parse_scalar(const std::string& value, const std::string& key);

template <>
double parse_scalar<double>(const std::string& value, const std::string& key) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': cannot parse number '" + value + "'");
  }
}

template <>
long parse_scalar<long>(const std::string& value, const std::string& key) {
  try {
    return std::stol(value);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': cannot parse integer '" + value + "'");
  }
}

template <>
int parse_scalar<int>(const std::string& value, const std::string& key) {
  return static_cast<int>(parse_scalar<long>(value, key));
}

template <>
std::uint64_t parse_scalar<std::uint64_t>(const std::string& value, const std::string& key) {
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': cannot parse integer '" + value + "'");
  }
}

template <>
bool parse_scalar<bool>(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::runtime_error("config key '" + key + "': expected true/false, got '" + value + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& value, const std::string& key) {
  std::vector<T> out;
  for (const auto& part : split(value, ',')) {
    const std::string item = trim(part);
    if (item.empty()) continue;
    out.push_back(parse_scalar<T>(item, key));
  }
  if (out.empty()) throw std::runtime_error("config key '" + key + "': empty list");
  return out;
}

}  // namespace

CampaignConfig parse_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);

  CampaignConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "p1") cfg.p1 = parse_scalar<double>(value, key);
    else if (key == "p2") cfg.p2 = parse_scalar<double>(value, key);
    else if (key == "p3") cfg.p3 = parse_scalar<double>(value, key);
    else if (key == "p4") cfg.p4 = parse_scalar<double>(value, key);
    else if (key == "p_r") cfg.p_r = parse_scalar<double>(value, key);
    else if (key == "gamma_exponent") cfg.gamma_exponent = parse_scalar<double>(value, key);
    else if (key == "reassess_scale") cfg.reassess_scale = parse_scalar<double>(value, key);
    else if (key == "recruit_curve") {
      if (value == "logistic") cfg.recruit_curve = abm::RecruitCurve::Logistic;
      else if (value == "mean_bout_6q") cfg.recruit_curve = abm::RecruitCurve::MeanBoutSixQ;
      else throw std::runtime_error("config key 'recruit_curve': unknown value '" + value + "'");
    } else if (key == "discovery") {
      if (value == "quality_at_site") cfg.discovery = abm::DiscoveryMode::QualityAtSite;
      else if (value == "half_range") cfg.discovery = abm::DiscoveryMode::HalfRangeDeterministic;
      else throw std::runtime_error("config key 'discovery': unknown value '" + value + "'");
    } else if (key == "tau") cfg.tau = parse_scalar<double>(value, key);
    else if (key == "quorum_count") {
      if (!value.empty()) cfg.quorum_count = parse_scalar<int>(value, key);
    } else if (key == "max_distance") cfg.max_distance = parse_scalar<double>(value, key);
    else if (key == "agent_speed") cfg.agent_speed = parse_scalar<double>(value, key);
    else if (key == "site_radius") cfg.site_radius = parse_scalar<double>(value, key);
    else if (key == "runtimes") cfg.runtimes = parse_list<long>(value, key);
    else if (key == "site_distances") cfg.site_distances = parse_list<double>(value, key);
    else if (key == "num_agents") cfg.agent_counts = parse_list<int>(value, key);
    else if (key == "num_sites") cfg.site_counts = parse_list<int>(value, key);
    else if (key == "quality_min") cfg.quality_min = parse_scalar<double>(value, key);
    else if (key == "quality_diff_max") cfg.quality_diff_max = parse_scalar<double>(value, key);
    else if (key == "quality_vectors") cfg.quality_vectors = parse_scalar<int>(value, key);
    else if (key == "qualities") cfg.fixed_qualities = parse_list<double>(value, key);
    else if (key == "repetitions") cfg.repetitions = parse_scalar<int>(value, key);
    else if (key == "initial_pool_size") cfg.initial_pool_size = parse_scalar<int>(value, key);
    else if (key == "seed") cfg.seed = parse_scalar<std::uint64_t>(value, key);
    else if (key == "tensor_encoding") {
      if (value == "float") cfg.tensor_encoding = codec::Encoding::Float;
      else if (value == "onehot") cfg.tensor_encoding = codec::Encoding::OneHot;
      else throw std::runtime_error("config key 'tensor_encoding': unknown value '" + value + "'");
    } else if (key == "log_trajectories") cfg.log_trajectories = parse_scalar<bool>(value, key);
    else if (key == "epochs") cfg.train.epochs = parse_scalar<int>(value, key);
    else if (key == "learning_rate") cfg.train.learning_rate = parse_scalar<double>(value, key);
    else if (key == "grad_clip_norm") cfg.train.grad_clip_norm = parse_scalar<double>(value, key);
    else if (key == "validation_split") cfg.train.validation_split = parse_scalar<double>(value, key);
    else if (key == "tsne_perplexity") cfg.tsne_perplexity = parse_scalar<double>(value, key);
    else if (key == "tsne_iterations") cfg.tsne_iterations = parse_scalar<int>(value, key);
    else if (key == "tsne_learning_rate") cfg.tsne_learning_rate = parse_scalar<double>(value, key);
    else if (key == "kmeans_k") cfg.kmeans_k = parse_scalar<int>(value, key);
    else if (key == "kmeans_restarts") cfg.kmeans_restarts = parse_scalar<int>(value, key);
    else throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }

  if (cfg.repetitions < 1) throw std::runtime_error("repetitions must be >= 1");
  if (cfg.tau <= 0.0 || cfg.tau >= 1.0) throw std::runtime_error("tau must lie in (0, 1)");
  return cfg;
}

void write_campaign_config(const CampaignConfig& cfg, const std::string& path) {
  std::ostringstream out;
  out << "p1 = " << format_double(cfg.p1) << "\n";
  out << "p2 = " << format_double(cfg.p2) << "\n";
  out << "p3 = " << format_double(cfg.p3) << "\n";
  out << "p4 = " << format_double(cfg.p4) << "\n";
  out << "p_r = " << format_double(cfg.p_r) << "\n";
  out << "gamma_exponent = " << format_double(cfg.gamma_exponent) << "\n";
  out << "reassess_scale = " << format_double(cfg.reassess_scale) << "\n";
  out << "recruit_curve = "
      << (cfg.recruit_curve == abm::RecruitCurve::Logistic ? "logistic" : "mean_bout_6q") << "\n";
  out << "discovery = "
      << (cfg.discovery == abm::DiscoveryMode::QualityAtSite ? "quality_at_site" : "half_range")
      << "\n";
  out << "tau = " << format_double(cfg.tau) << "\n";
  if (cfg.quorum_count) out << "quorum_count = " << *cfg.quorum_count << "\n";
  out << "max_distance = " << format_double(cfg.max_distance) << "\n";
  out << "agent_speed = " << format_double(cfg.agent_speed) << "\n";
  out << "site_radius = " << format_double(cfg.site_radius) << "\n";

  auto write_list = [&out](const std::string& key, const auto& values) {
    out << key << " = ";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ",";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        out << format_double(values[i]);
      } else {
        out << values[i];
      }
    }
    out << "\n";
  };
  write_list("runtimes", cfg.runtimes);
  write_list("site_distances", cfg.site_distances);
  write_list("num_agents", cfg.agent_counts);
  write_list("num_sites", cfg.site_counts);
  out << "quality_min = " << format_double(cfg.quality_min) << "\n";
  out << "quality_diff_max = " << format_double(cfg.quality_diff_max) << "\n";
  out << "quality_vectors = " << cfg.quality_vectors << "\n";
  if (!cfg.fixed_qualities.empty()) write_list("qualities", cfg.fixed_qualities);
  out << "repetitions = " << cfg.repetitions << "\n";
  out << "initial_pool_size = " << cfg.initial_pool_size << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "tensor_encoding = " << codec::to_string(cfg.tensor_encoding) << "\n";
  out << "log_trajectories = " << (cfg.log_trajectories ? "true" : "false") << "\n";
  out << "epochs = " << cfg.train.epochs << "\n";
  out << "learning_rate = " << format_double(cfg.train.learning_rate) << "\n";
  out << "grad_clip_norm = " << format_double(cfg.train.grad_clip_norm) << "\n";
  out << "validation_split = " << format_double(cfg.train.validation_split) << "\n";
  out << "tsne_perplexity = " << format_double(cfg.tsne_perplexity) << "\n";
  out << "tsne_iterations = " << cfg.tsne_iterations << "\n";
  out << "tsne_learning_rate = " << format_double(cfg.tsne_learning_rate) << "\n";
  out << "kmeans_k = " << cfg.kmeans_k << "\n";
  out << "kmeans_restarts = " << cfg.kmeans_restarts << "\n";

  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write config file " + path);
  file << out.str();
}

CampaignConfig table2_preset() { return CampaignConfig{}; }

CampaignConfig experiment1_config() {
  CampaignConfig cfg;
  cfg.p1 = 1.0 / 8.0;
  cfg.p4 = 1.0 / 3.0;
  cfg.p_r = 1.0 / 40.0;
  cfg.p3 = 0.0;
  cfg.recruit_curve = abm::RecruitCurve::MeanBoutSixQ;
  cfg.discovery = abm::DiscoveryMode::HalfRangeDeterministic;
  cfg.quorum_count = 3;
  cfg.runtimes = {10000};
  cfg.site_distances = {250.0};
  cfg.agent_counts = {10};
  cfg.site_counts = {2};
  cfg.fixed_qualities = {1.0, 0.5};
  cfg.tensor_encoding = codec::Encoding::OneHot;
  return cfg;
}

}  // namespace bestofn::harness
