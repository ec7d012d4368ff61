#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "bestofn/harness/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bestofn: hub-colony best-of-N simulator and graph-embedding toolkit"};
  app.require_subcommand(1);

  bestofn::harness::PipelineOptions options;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "campaign config file (key = value)");
    cmd->add_option("--out", options.out_dir, "artifact directory")->capture_default_str();
    cmd->add_option("--workers", options.workers, "parallel worker limit (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--seed", seed_value, "base seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--preset", options.preset, "named preset: table2 | experiment1")
        ->check(CLI::IsMember({"table2", "experiment1"}));
  };

  std::map<std::string, std::function<int(const bestofn::harness::PipelineOptions&)>> commands{
      {"simulate", bestofn::harness::cmd_simulate}, {"graph", bestofn::harness::cmd_graph},
      {"train", bestofn::harness::cmd_train},       {"embed", bestofn::harness::cmd_embed},
      {"analyze", bestofn::harness::cmd_analyze},   {"export", bestofn::harness::cmd_export},
  };
  const std::map<std::string, std::string> descriptions{
      {"simulate", "run the simulation campaign, writing trajectory logs and metrics"},
      {"graph", "build per-trial subgraphs and the merged collective-state graph"},
      {"train", "train the graph encoder on subgraph samples"},
      {"embed", "emit 3D node embeddings of the merged graph"},
      {"analyze", "success probabilities, labels, clusters, convergence tables"},
      {"export", "consolidate plot-ready CSV tables"},
  };
  for (const auto& [name, fn] : commands) {
    add_common(app.add_subcommand(name, descriptions.at(name)));
  }

  CLI11_PARSE(app, argc, argv);

  if (seed_set) options.seed = seed_value;
  try {
    for (const auto& [name, fn] : commands) {
      if (app.get_subcommand(name)->parsed()) return fn(options);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
