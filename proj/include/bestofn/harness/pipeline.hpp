#pragma once

#include <optional>
#include <string>

#include "bestofn/harness/campaign.hpp"

namespace bestofn::harness {

struct PipelineOptions {
  std::string config_path;  // empty: preset or defaults
  std::string preset;       // "", "table2", "experiment1"
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int workers = 0;
};

/// Resolves config file / preset / seed override into a campaign config.
CampaignConfig resolve_config(const PipelineOptions& options);

/// simulate: run the campaign, write trajectory logs + metrics.
int cmd_simulate(const PipelineOptions& options);

/// graph: build per-trial subgraphs and the merged collective-state graph
/// from the trajectory logs under out_dir.
int cmd_graph(const PipelineOptions& options);

/// train: fit the encoder on the per-simulation subgraphs.
int cmd_train(const PipelineOptions& options);

/// embed: 3D embeddings of the merged graph with labels.
int cmd_embed(const PipelineOptions& options);

/// analyze: success probabilities, labels, t-SNE + k-means clusters,
/// metric aggregation tables.
int cmd_analyze(const PipelineOptions& options);

/// export: consolidated plot-ready CSVs.
int cmd_export(const PipelineOptions& options);

}  // namespace bestofn::harness
