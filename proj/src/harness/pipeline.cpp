#include "bestofn/harness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bestofn/analysis/kmeans.hpp"
#include "bestofn/analysis/success.hpp"
#include "bestofn/analysis/tsne.hpp"
#include "bestofn/core/text.hpp"
#include "bestofn/encoder/train.hpp"

namespace bestofn::harness {

namespace fs = std::filesystem;

CampaignConfig resolve_config(const PipelineOptions& options) {
  CampaignConfig cfg;
  if (!options.config_path.empty()) {
    cfg = parse_campaign_config(options.config_path);
  } else if (options.preset == "experiment1") {
    cfg = experiment1_config();
  } else if (options.preset == "table2" || options.preset.empty()) {
    cfg = table2_preset();
  } else {
    throw std::runtime_error("unknown preset '" + options.preset + "'");
  }
  if (options.seed) cfg.seed = *options.seed;
  return cfg;
}

int cmd_simulate(const PipelineOptions& options) {
  const CampaignConfig cfg = resolve_config(options);
  const CampaignResult result = run_campaign(cfg, options.out_dir, options.workers);
  std::cout << "simulate: " << result.trials.size() << " trials -> " << options.out_dir << "\n";
  return 0;
}

namespace {

std::vector<fs::path> find_trial_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  const fs::path cells = root / "cells";
  if (!fs::exists(cells)) return dirs;
  for (const auto& entry : fs::recursive_directory_iterator(cells)) {
    if (entry.is_regular_file() && entry.path().filename() == "meta.json") {
      dirs.push_back(entry.path().parent_path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

codec::Encoding read_encoding(const fs::path& root) {
  const fs::path echo = root / "config.echo.cfg";
  if (fs::exists(echo)) {
    return parse_campaign_config(echo.string()).tensor_encoding;
  }
  return codec::Encoding::Float;
}

CampaignConfig read_echo_config(const fs::path& root) {
  const fs::path echo = root / "config.echo.cfg";
  if (!fs::exists(echo)) {
    throw std::runtime_error("no config.echo.cfg under " + root.string() +
                             "; run simulate first");
  }
  return parse_campaign_config(echo.string());
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '/') c = '_';
  }
  return s;
}

}  // namespace

int cmd_graph(const PipelineOptions& options) {
  const fs::path root(options.out_dir);
  const auto trial_dirs = find_trial_dirs(root);
  if (trial_dirs.empty()) {
    std::cerr << "graph: no trial logs under " << root << "; run simulate first\n";
    return 1;
  }
  const codec::Encoding encoding = read_encoding(root);
  graph::CodecSettings codec_settings;
  codec_settings.encoding = encoding;

  fs::create_directories(root / "graphs" / "subgraphs");
  graph::CollectiveGraph merged;
  Manifest manifest(root);
  for (const auto& dir : trial_dirs) {
    const TrialMeta meta = read_trial_meta((dir / "meta.json").string());
    abm::Trajectory traj = read_trajectory_jsonl((dir / "trajectory.jsonl").string());
    graph::CollectiveGraph sub =
        graph::subgraph_sample(traj, meta.world, codec_settings, meta.sim_id);
    const std::string name = sanitize(meta.sim_id) + ".json";
    save_graph(sub, encoding, (root / "graphs" / "subgraphs" / name).string());
    manifest.record("graphs/subgraphs/" + name);
    merged.merge(sub);
  }
  analysis::apply_labels(merged);
  save_graph(merged, encoding, (root / "graphs" / "merged.json").string());
  manifest.record("graphs/merged.json");
  manifest.save();
  std::cout << "graph: " << merged.node_count() << " nodes, " << merged.edge_count()
            << " edges from " << trial_dirs.size() << " trials\n";
  return 0;
}

int cmd_train(const PipelineOptions& options) {
  const fs::path root(options.out_dir);
  const fs::path subgraph_dir = root / "graphs" / "subgraphs";
  if (!fs::exists(subgraph_dir)) {
    std::cerr << "train: no subgraph samples under " << root << "; run graph first\n";
    return 1;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(subgraph_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "train: no subgraph samples\n";
    return 1;
  }

  const CampaignConfig cfg = read_echo_config(root);
  if (cfg.tensor_encoding != codec::Encoding::Float) {
    std::cerr << "train: encoder input needs tensor_encoding = float\n";
    return 1;
  }

#ifdef _OPENMP
  if (options.workers > 0) omp_set_num_threads(options.workers);
#endif

  std::vector<encoder::EncodedGraph> encoded;
  for (const auto& file : files) {
    auto [g, enc] = load_graph(file.string());
    if (g.node_count() < 2) continue;  // single-state runs carry no edges
    encoded.push_back(encoder::prepare_graph(g, 40));
  }
  if (encoded.empty()) {
    std::cerr << "train: no usable subgraph samples (all trivial)\n";
    return 1;
  }

  // Held-out tail for scoring; at least one subgraph stays in training.
  const auto split = static_cast<std::size_t>(
      std::max<double>(1.0, std::ceil((1.0 - cfg.train.validation_split) *
                                      static_cast<double>(encoded.size()))));
  std::vector<encoder::EncodedGraph> train_set(encoded.begin(),
                                               encoded.begin() + std::min(split, encoded.size()));
  std::vector<encoder::EncodedGraph> val_set(encoded.begin() + std::min(split, encoded.size()),
                                             encoded.end());

  encoder::EncoderModel model = encoder::init_model(cfg.seed);
  encoder::TrainResult trained = encoder::train(std::move(model), train_set, cfg.train);

  fs::create_directories(root / "model");
  encoder::save_model(trained.model, (root / "model" / "model.json").string());
  {
    std::ofstream out(root / "model" / "loss_history.csv");
    out << "epoch,mean_loss\n";
    for (std::size_t e = 0; e < trained.loss_history.size(); ++e) {
      out << (e + 1) << ',' << format_double(trained.loss_history[e]) << "\n";
    }
  }
  Manifest manifest(root);
  manifest.record("model/model.json");
  manifest.record("model/loss_history.csv");
  manifest.save();

  std::cout << "train: " << train_set.size() << " subgraphs, " << trained.loss_history.size()
            << " epochs, loss " << trained.loss_history.front() << " -> "
            << trained.loss_history.back() << "\n";
  if (!val_set.empty()) {
    std::cout << "train: held-out edge AUC " << encoder::edge_auc(trained.model, val_set) << "\n";
  }
  return 0;
}

int cmd_embed(const PipelineOptions& options) {
  const fs::path root(options.out_dir);
  const fs::path model_path = root / "model" / "model.json";
  const fs::path graph_path = root / "graphs" / "merged.json";
  if (!fs::exists(model_path)) {
    std::cerr << "embed: no trained model under " << root << "; run train first\n";
    return 1;
  }
  if (!fs::exists(graph_path)) {
    std::cerr << "embed: no merged graph under " << root << "; run graph first\n";
    return 1;
  }
  const encoder::EncoderModel model = encoder::load_model(model_path.string());
  auto [merged, encoding] = load_graph(graph_path.string());
  const auto embeddings = encoder::embed_graph(model, merged);
  const auto labels = analysis::label_nodes(merged);

  fs::create_directories(root / "embed");
  {
    std::ofstream out(root / "embed" / "embeddings.csv");
    out << "key,e1,e2,e3,label,visits\n";
    for (const auto& [key, e] : embeddings) {
      out << key << ',' << format_double(e[0]) << ',' << format_double(e[1]) << ','
          << format_double(e[2]) << ',' << graph::to_string(labels.at(key)) << ','
          << merged.node_at(key).visit_count << "\n";
    }
  }
  Manifest manifest(root);
  manifest.record("embed/embeddings.csv");
  manifest.save();
  std::cout << "embed: " << embeddings.size() << " nodes\n";
  return 0;
}

int cmd_analyze(const PipelineOptions& options) {
  const fs::path root(options.out_dir);
  const fs::path graph_path = root / "graphs" / "merged.json";
  if (!fs::exists(graph_path)) {
    std::cerr << "analyze: no merged graph under " << root << "; run graph first\n";
    return 1;
  }
  const CampaignConfig cfg = read_echo_config(root);
  auto [merged, encoding] = load_graph(graph_path.string());

#ifdef _OPENMP
  if (options.workers > 0) omp_set_num_threads(options.workers);
#endif

  fs::create_directories(root / "analysis");
  Manifest manifest(root);

  const analysis::SuccessStats stats = analysis::success_probability(merged);
  {
    std::ofstream out(root / "analysis" / "success_probability.csv");
    out << "key,on_successful,on_any,probability,reliable\n";
    for (const auto& [key, node] : stats.per_node) {
      out << key << ',' << node.on_successful << ',' << node.on_any << ','
          << format_double(node.probability) << ',' << (node.reliable ? "true" : "false") << "\n";
    }
  }
  manifest.record("analysis/success_probability.csv");

  const auto labels = analysis::label_nodes(merged);
  {
    std::ofstream out(root / "analysis" / "labels.csv");
    out << "key,label\n";
    for (const auto& [key, label] : labels) {
      out << key << ',' << graph::to_string(label) << "\n";
    }
  }
  manifest.record("analysis/labels.csv");

  // t-SNE on the raw node tensors, then k-means over the 2D layout.
  const auto order = merged.node_order();
  if (order.size() >= 4) {
    const int width = static_cast<int>(merged.node_at(order.front()).tensor.values.size());
    Matrix points(static_cast<int>(order.size()), width);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& values = merged.node_at(order[i]).tensor.values;
      for (int c = 0; c < width; ++c) points(static_cast<int>(i), c) = values[static_cast<std::size_t>(c)];
    }
    analysis::TsneConfig tsne_cfg;
    tsne_cfg.perplexity = std::min(cfg.tsne_perplexity,
                                   (static_cast<double>(order.size()) - 1.0) / 3.0 - 1e-9);
    tsne_cfg.iterations = cfg.tsne_iterations;
    tsne_cfg.learning_rate = cfg.tsne_learning_rate;
    tsne_cfg.seed = cfg.seed;
    const analysis::TsneResult layout = analysis::tsne_2d(points, tsne_cfg);

    Matrix coords(static_cast<int>(order.size()), 2);
    for (std::size_t i = 0; i < order.size(); ++i) {
      coords(static_cast<int>(i), 0) = layout.points[i][0];
      coords(static_cast<int>(i), 1) = layout.points[i][1];
    }
    const int k = std::min(cfg.kmeans_k, static_cast<int>(order.size()));
    const analysis::KmeansResult clusters =
        analysis::kmeans(coords, k, cfg.seed, cfg.kmeans_restarts);

    std::ofstream out(root / "analysis" / "clusters2d.csv");
    out << "key,tsne_x,tsne_y,cluster,success_probability,reliable\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto it = stats.per_node.find(order[i]);
      out << order[i] << ',' << format_double(layout.points[i][0]) << ','
          << format_double(layout.points[i][1]) << ','
          << clusters.labels[i] << ','
          << (it != stats.per_node.end() ? format_double(it->second.probability) : "") << ','
          << (it != stats.per_node.end() && it->second.reliable ? "true" : "false") << "\n";
    }
    manifest.record("analysis/clusters2d.csv");
  }

  // Convergence aggregates from the metrics table.
  const fs::path metrics_path = root / "metrics.csv";
  if (fs::exists(metrics_path)) {
    const auto rows = read_metrics_csv(metrics_path.string());
    const auto groups = analysis::aggregate_metrics(rows);
    {
      std::ofstream out(root / "analysis" / "success_vs_qdiff.csv");
      out << "qdiff_bin_lo,qdiff_bin_hi,distance,mean_success,success_p25,success_p75,"
             "converged,total\n";
      for (const auto& [key, g] : groups) {
        if (g.converged == 0) continue;
        out << format_double(0.1 * key.quality_diff_bin) << ','
            << format_double(0.1 * (key.quality_diff_bin + 1)) << ','
            << format_double(key.distance) << ',' << format_double(g.mean_success) << ','
            << format_double(g.success_p25) << ',' << format_double(g.success_p75) << ','
            << g.converged << ',' << g.total << "\n";
      }
    }
    manifest.record("analysis/success_vs_qdiff.csv");
    {
      std::ofstream out(root / "analysis" / "time_vs_qdiff.csv");
      out << "qdiff_bin_lo,qdiff_bin_hi,distance,mean_ticks,ticks_p25,ticks_p75,"
             "converged,total\n";
      for (const auto& [key, g] : groups) {
        if (g.converged == 0) continue;
        out << format_double(0.1 * key.quality_diff_bin) << ','
            << format_double(0.1 * (key.quality_diff_bin + 1)) << ','
            << format_double(key.distance) << ',' << format_double(g.mean_ticks) << ','
            << format_double(g.ticks_p25) << ',' << format_double(g.ticks_p75) << ','
            << g.converged << ',' << g.total << "\n";
      }
    }
    manifest.record("analysis/time_vs_qdiff.csv");
  }

  manifest.save();
  std::cout << "analyze: " << stats.per_node.size() << " nodes over "
            << stats.trajectory_count << " trajectories\n";
  return 0;
}

int cmd_export(const PipelineOptions& options) {
  const fs::path root(options.out_dir);
  const std::vector<std::pair<fs::path, std::string>> wanted = {
      {root / "analysis" / "success_vs_qdiff.csv", "export/success_vs_qdiff.csv"},
      {root / "analysis" / "time_vs_qdiff.csv", "export/time_vs_qdiff.csv"},
      {root / "analysis" / "clusters2d.csv", "export/clusters2d.csv"},
      {root / "embed" / "embeddings.csv", "export/embeddings3d.csv"},
  };
  fs::create_directories(root / "export");
  Manifest manifest(root);
  int copied = 0;
  for (const auto& [src, dst] : wanted) {
    if (!fs::exists(src)) continue;
    fs::copy_file(src, root / dst, fs::copy_options::overwrite_existing);
    manifest.record(dst);
    ++copied;
  }
  manifest.save();
  if (copied == 0) {
    std::cerr << "export: nothing to export; run analyze/embed first\n";
    return 1;
  }
  std::cout << "export: " << copied << " tables -> " << (root / "export") << "\n";
  return 0;
}

}  // namespace bestofn::harness
