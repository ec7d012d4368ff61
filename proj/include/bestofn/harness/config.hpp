#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bestofn/abm/simulation.hpp"
#include "bestofn/codec/tensor.hpp"
#include "bestofn/encoder/train.hpp"

namespace bestofn::harness {

/// Campaign parameters: the simulation table fields plus harness and
/// training knobs. Parsed from a key = value text file.
struct CampaignConfig {
  // Transition parameters.
  double p1 = 0.01;
  double p2 = 0.99;
  double p3 = 0.02;
  double p4 = 0.1;
  double p_r = 0.1;
  double gamma_exponent = 0.5;
  double reassess_scale = 3.0;
  abm::RecruitCurve recruit_curve = abm::RecruitCurve::Logistic;
  abm::DiscoveryMode discovery = abm::DiscoveryMode::QualityAtSite;

  // World and decision rule.
  double tau = 0.5;
  std::optional<int> quorum_count;
  double max_distance = 1000.0;
  double agent_speed = 2.0;
  double site_radius = 10.0;

  // Experiment grid.
  std::vector<long> runtimes{1000, 10000, 35000};
  std::vector<double> site_distances{100.0, 150.0, 200.0};
  std::vector<int> agent_counts{5, 10};
  std::vector<int> site_counts{2, 3, 4};
  double quality_min = 0.5;
  double quality_diff_max = 0.5;
  int quality_vectors = 5;
  /// Explicit quality vector (stops sampling when set; sites get these).
  std::vector<double> fixed_qualities;

  // Harness.
  int repetitions = 10;
  int initial_pool_size = 10;
  std::uint64_t seed = 42;
  codec::Encoding tensor_encoding = codec::Encoding::Float;
  bool log_trajectories = true;

  // Encoder training.
  encoder::TrainConfig train;

  // Analysis.
  double tsne_perplexity = 15.0;
  int tsne_iterations = 1000;
  double tsne_learning_rate = 200.0;
  int kmeans_k = 4;
  int kmeans_restarts = 4;

  abm::TransitionParams transition_params() const;
  abm::WorldConfig world_for(int num_agents, int num_sites, double distance,
                             const std::vector<double>& qualities, long max_ticks,
                             std::uint64_t placement_seed) const;
};

CampaignConfig parse_campaign_config(const std::string& path);
void write_campaign_config(const CampaignConfig& config, const std::string& path);

/// The two named presets selectable from the CLI.
CampaignConfig table2_preset();
CampaignConfig experiment1_config();

}  // namespace bestofn::harness
