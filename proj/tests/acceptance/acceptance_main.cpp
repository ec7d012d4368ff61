// Acceptance suite: nine end-to-end criteria, one PASS/FAIL line each.
// Run with no arguments for the full suite or with a criterion number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bestofn/abm/simulation.hpp"
#include "bestofn/analysis/embedding.hpp"
#include "bestofn/analysis/kmeans.hpp"
#include "bestofn/analysis/metrics.hpp"
#include "bestofn/analysis/success.hpp"
#include "bestofn/analysis/tsne.hpp"
#include "bestofn/core/hash.hpp"
#include "bestofn/encoder/train.hpp"
#include "bestofn/graph/collective_graph.hpp"
#include "bestofn/harness/campaign.hpp"
#include "bestofn/harness/io.hpp"

using namespace bestofn;
using namespace bestofn::abm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Snapshot all_observe(const WorldConfig& world, std::uint64_t seed) {
  Rng rng(seed);
  return make_initial_condition(InitialConditionKind::AllObserve, world, rng);
}

std::vector<encoder::EncodedGraph> simulate_subgraph_corpus(std::size_t count, long runtime,
                                                            int min_nodes) {
  TransitionParams params;
  graph::CodecSettings cs;
  WorldConfig world = make_world(10, 2, 100.0, {0.9, 0.7}, runtime, 5);
  std::vector<encoder::EncodedGraph> graphs;
  int t = 0;
  while (graphs.size() < count) {
    Trajectory traj = run_simulation(world, params, all_observe(world, mix64(3, t)), mix64(7, t));
    graph::CollectiveGraph sub = graph::subgraph_sample(traj, world, cs, "s" + std::to_string(t));
    if (static_cast<int>(sub.node_count()) >= min_nodes) {
      graphs.push_back(encoder::prepare_graph(sub, 40));
    }
    ++t;
  }
  return graphs;
}

encoder::EncodedGraph random_subgraph(int n, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  encoder::EncodedGraph g;
  g.n = n;
  g.features = Matrix(n, 40);
  for (double& v : g.features.data) v = rng.uniform(-1.0, 1.0);
  g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
  g.neighbors.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(edge_prob)) {
        g.adjacency[static_cast<std::size_t>(i) * n + j] = 1;
        g.adjacency[static_cast<std::size_t>(j) * n + i] = 1;
        g.neighbors[static_cast<std::size_t>(i)].push_back(j);
        g.neighbors[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  return g;
}

// ---- 1. Determinism --------------------------------------------------

Verdict criterion_determinism() {
  std::ostringstream detail;
  bool ok = true;

  TransitionParams params;
  WorldConfig world = make_world(10, 2, 100.0, {0.9, 0.7}, 2000, 21);
  const fs::path tmp = fs::temp_directory_path() / "bestofn_acceptance_c1";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  {  // trajectories, byte compared through the JSONL writer
    Trajectory a = run_simulation(world, params, all_observe(world, 8), 4711);
    Trajectory b = run_simulation(world, params, all_observe(world, 8), 4711);
    harness::write_trajectory_jsonl(a, world, (tmp / "a.jsonl").string());
    harness::write_trajectory_jsonl(b, world, (tmp / "b.jsonl").string());
    const bool same = slurp(tmp / "a.jsonl") == slurp(tmp / "b.jsonl");
    ok &= same;
    detail << "trajectory " << (same ? "ok" : "DIFFERS");
  }
  {  // graphs
    graph::CodecSettings cs;
    auto build = [&](const std::string& name) {
      graph::CollectiveGraph merged;
      for (int t = 0; t < 5; ++t) {
        Trajectory traj =
            run_simulation(world, params, all_observe(world, mix64(13, t)), mix64(17, t));
        merged.merge(graph::subgraph_sample(traj, world, cs, "s" + std::to_string(t)));
      }
      harness::save_graph(merged, codec::Encoding::Float, (tmp / name).string());
    };
    build("ga.json");
    build("gb.json");
    const bool same = slurp(tmp / "ga.json") == slurp(tmp / "gb.json");
    ok &= same;
    detail << ", graph " << (same ? "ok" : "DIFFERS");
  }
  {  // training loss history, bit identical
    auto corpus = simulate_subgraph_corpus(5, 1000, 8);
    encoder::TrainConfig cfg;
    cfg.epochs = 20;
    auto r1 = encoder::train(encoder::init_model(55), corpus, cfg);
    auto r2 = encoder::train(encoder::init_model(55), corpus, cfg);
    const bool same = r1.loss_history == r2.loss_history && r1.model == r2.model;
    ok &= same;
    detail << ", training " << (same ? "ok" : "DIFFERS");
  }
  {  // t-SNE layouts and k-means labels
    Rng rng(77);
    Matrix points(60, 8);
    for (double& v : points.data) v = rng.uniform(0.0, 1.0);
    analysis::TsneConfig cfg;
    cfg.perplexity = 10.0;
    cfg.iterations = 300;
    cfg.seed = 5;
    auto la = analysis::tsne_2d(points, cfg);
    auto lb = analysis::tsne_2d(points, cfg);
    bool same = la.points == lb.points;
    ok &= same;
    detail << ", t-SNE " << (same ? "ok" : "DIFFERS");

    auto ka = analysis::kmeans(points, 4, 9, 4);
    auto kb = analysis::kmeans(points, 4, 9, 4);
    same = ka.labels == kb.labels && ka.centroids == kb.centroids && ka.inertia == kb.inertia;
    ok &= same;
    detail << ", k-means " << (same ? "ok" : "DIFFERS");
  }
  {  // a whole campaign, metrics byte compared
    harness::CampaignConfig cfg;
    cfg.runtimes = {400};
    cfg.site_distances = {100.0};
    cfg.agent_counts = {5};
    cfg.site_counts = {2};
    cfg.fixed_qualities = {0.9, 0.7};
    cfg.repetitions = 2;
    cfg.initial_pool_size = 4;
    cfg.seed = 3;
    harness::run_campaign(cfg, (tmp / "camp_a").string());
    harness::run_campaign(cfg, (tmp / "camp_b").string());
    const bool same = slurp(tmp / "camp_a" / "metrics.csv") == slurp(tmp / "camp_b" / "metrics.csv");
    ok &= same;
    detail << ", campaign " << (same ? "ok" : "DIFFERS");
  }
  fs::remove_all(tmp);
  return {ok, detail.str()};
}

// ---- 2. Gradient fidelity --------------------------------------------

Verdict criterion_gradients() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    encoder::EncoderModel model = encoder::init_model(seed);
    encoder::EncodedGraph g = random_subgraph(10, 0.3, 1000 + seed);
    worst = std::max(worst, encoder::gradient_check(model, g, 1e-5));
  }
  std::ostringstream detail;
  detail << "max relative error " << worst << " over 20 ten-node subgraphs (bound 1e-4)";
  return {worst < 1e-4, detail.str()};
}

// ---- 3. Reconstruction learning ----------------------------------------

Verdict criterion_training() {
  auto graphs = simulate_subgraph_corpus(38, 10000, 8);
  std::vector<encoder::EncodedGraph> train_set(graphs.begin(), graphs.begin() + 30);
  std::vector<encoder::EncodedGraph> val_set(graphs.begin() + 30, graphs.end());

  encoder::TrainConfig cfg;  // lr 1e-3, 200 epochs, clip 5
  auto result = encoder::train(encoder::init_model(97), train_set, cfg);
  const double initial = result.loss_history.front();
  const double final_loss = result.loss_history.back();
  const double auc = encoder::edge_auc(result.model, val_set);

  std::ostringstream detail;
  detail << "loss " << initial << " -> " << final_loss << " (ratio "
         << final_loss / initial << ", bound 0.5); held-out AUC " << auc << " (bound 0.8)";
  return {final_loss <= 0.5 * initial && auc > 0.8, detail.str()};
}

// ---- 4. Convergence time grows with distance ---------------------------

Verdict criterion_time_trend() {
  TransitionParams params;
  SimOptions opt;
  opt.record_snapshots = false;
  std::ostringstream detail;
  std::vector<double> means;
  for (double dist : {100.0, 150.0, 200.0}) {
    WorldConfig world = make_world(10, 2, dist, {0.9, 0.7}, 35000, 42);
    long converged = 0, tick_sum = 0;
    for (int t = 0; t < 140 && converged < 120; ++t) {
      Trajectory traj = run_simulation(world, params, all_observe(world, mix64(900, t)),
                                       mix64(5000 + static_cast<std::uint64_t>(dist), t), opt);
      if (traj.outcome.decided) {
        ++converged;
        tick_sum += traj.ticks_elapsed;
      }
    }
    if (converged < 100) {
      detail << "only " << converged << " converged at distance " << dist;
      return {false, detail.str()};
    }
    means.push_back(static_cast<double>(tick_sum) / static_cast<double>(converged));
    detail << "d=" << dist << ": mean " << means.back() << " ticks (n=" << converged << ")  ";
  }
  const bool ok = means[0] < means[1] && means[1] < means[2];
  detail << (ok ? "strictly increasing" : "NOT strictly increasing");
  return {ok, detail.str()};
}

// ---- 5. Success U-shape across quality-difference bins ------------------

Verdict criterion_success_shape() {
  TransitionParams params;
  SimOptions opt;
  opt.record_snapshots = false;
  const double bin_lo[3] = {0.0, 0.2, 0.4};
  double mean[3];
  long n[3];
  std::ostringstream detail;
  for (int b = 0; b < 3; ++b) {
    Rng qrng(555 + b);
    double sum = 0.0;
    long converged = 0;
    for (int p = 0; p < 40; ++p) {
      double qa, qb;
      do {
        qa = qrng.uniform(0.5, 1.0);
        qb = qrng.uniform(0.5, 1.0);
      } while (std::abs(qa - qb) < bin_lo[b] || std::abs(qa - qb) >= bin_lo[b] + 0.1);
      if (qb > qa) std::swap(qa, qb);
      const std::uint64_t base = mix64(4242, static_cast<std::uint64_t>(b * 1000 + p));
      WorldConfig world = make_world(10, 2, 100.0, {qa, qb}, 10000, base);
      for (int t = 0; t < 100; ++t) {
        Trajectory traj = run_simulation(world, params, all_observe(world, mix64(base, t)),
                                         mix64(base, 50000 + t), opt);
        if (traj.outcome.decided) {
          ++converged;
          sum += analysis::success_metric(world.site(traj.outcome.site).quality, {qa, qb});
        }
      }
    }
    mean[b] = sum / static_cast<double>(converged);
    n[b] = converged;
    detail << "bin[" << bin_lo[b] << "," << bin_lo[b] + 0.1 << "): mean " << mean[b]
           << " (n=" << converged << ")  ";
  }
  const bool enough = n[0] >= 100 && n[1] >= 100 && n[2] >= 100;
  const bool left = mean[0] >= mean[1];
  const bool right = mean[2] >= mean[1];
  detail << (left ? "left arm ok" : "LEFT ARM FAILS") << ", "
         << (right ? "right arm ok" : "RIGHT ARM FAILS");
  return {enough && left && right, detail.str()};
}

// ---- 6. Best-site share in the small two-site setup ---------------------

Verdict criterion_small_setup() {
  auto preset = experiment1_preset(10000, 1);
  SimOptions opt;
  opt.record_snapshots = false;
  long converged = 0, best = 0;
  for (int t = 0; t < 500; ++t) {
    Rng rng(mix64(100, t));
    Snapshot init = make_initial_condition(InitialConditionKind::RandomStates, preset.world, rng);
    Trajectory traj = run_simulation(preset.world, preset.params, init, mix64(7000, t), opt);
    if (traj.outcome.decided) {
      ++converged;
      best += traj.outcome.site == 0;
    }
  }
  const double share = static_cast<double>(best) / static_cast<double>(converged);
  std::ostringstream detail;
  detail << "500 trials, " << converged << " converged, best site in " << 100.0 * share
         << "% (band 55-85%)";
  return {share >= 0.55 && share <= 0.85, detail.str()};
}

// ---- 7. Embedding label separation --------------------------------------

Verdict criterion_label_separation() {
  TransitionParams params;
  graph::CodecSettings cs;
  graph::CollectiveGraph merged;
  std::vector<encoder::EncodedGraph> train_set;
  int trial_idx = 0;
  for (double quality_b : {0.65, 0.7}) {
    WorldConfig world = make_world(10, 2, 100.0, {0.9, quality_b}, 10000,
                                   mix64(31337, static_cast<std::uint64_t>(quality_b * 100)));
    for (int t = 0; t < 30; ++t, ++trial_idx) {
      Trajectory traj =
          run_simulation(world, params, all_observe(world, mix64(91, trial_idx)), mix64(17, trial_idx));
      graph::CollectiveGraph sub =
          graph::subgraph_sample(traj, world, cs, "t" + std::to_string(trial_idx));
      if (sub.node_count() >= 2 && train_set.size() < 30) {
        train_set.push_back(encoder::prepare_graph(sub, 40));
      }
      merged.merge(sub);
    }
  }
  encoder::TrainConfig cfg;
  auto trained = encoder::train(encoder::init_model(2024), train_set, cfg);
  const auto embeddings = encoder::embed_graph(trained.model, merged);
  const auto labels = analysis::label_nodes(merged);

  std::vector<std::array<double, 3>> points;
  std::vector<int> knn_labels;
  long s_count = 0, f_count = 0;
  for (const auto& [key, e] : embeddings) {
    points.push_back(e);
    switch (labels.at(key)) {
      case graph::NodeLabel::Success: knn_labels.push_back(1); ++s_count; break;
      case graph::NodeLabel::Failure: knn_labels.push_back(0); ++f_count; break;
      default: knn_labels.push_back(-1); break;
    }
  }
  const double agreement = analysis::knn_label_agreement(points, knn_labels, 5);
  const double share = analysis::majority_class_share(knn_labels);
  const double floor = std::max(0.6, share + 0.05);
  std::ostringstream detail;
  detail << "5-NN agreement " << agreement << " over " << s_count << " success / " << f_count
         << " failure nodes (bound " << floor << ")";
  return {agreement > floor, detail.str()};
}

// ---- 8. Oracle equivalences ---------------------------------------------

// Test-side union-find.
class UnionFind {
 public:
  int add(const std::string& key) {
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(parent_.size()));
    if (inserted) parent_.push_back(it->second);
    return it->second;
  }
  void unite(const std::string& a, const std::string& b) {
    int ra = find(add(a)), rb = find(add(b));
    if (ra != rb) parent_[static_cast<std::size_t>(rb)] = ra;
  }
  std::set<std::string> largest_component() {
    std::map<int, std::set<std::string>> comps;
    for (const auto& [key, idx] : index_) comps[find(idx)].insert(key);
    std::set<std::string> best;
    for (auto& [root, members] : comps) {
      if (members.size() > best.size() ||
          (members.size() == best.size() && !best.empty() && *members.begin() < *best.begin())) {
        best = members;
      }
    }
    return best;
  }

 private:
  int find(int i) {
    while (parent_[static_cast<std::size_t>(i)] != i) {
      parent_[static_cast<std::size_t>(i)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(i)])];
      i = parent_[static_cast<std::size_t>(i)];
    }
    return i;
  }
  std::map<std::string, int> index_;
  std::vector<int> parent_;
};

Verdict criterion_oracles() {
  std::ostringstream detail;
  bool ok = true;

  TransitionParams params;
  graph::CodecSettings cs;
  WorldConfig world = make_world(10, 2, 100.0, {0.9, 0.7}, 600, 31);

  {  // merged per-simulation subgraphs equal the all-trajectory graph
    graph::CollectiveGraph all, merged;
    for (int t = 0; t < 10; ++t) {
      Trajectory traj =
          run_simulation(world, params, all_observe(world, mix64(41, t)), mix64(43, t));
      all.add_trajectory(traj, world, cs, "s" + std::to_string(t));
      merged.merge(graph::subgraph_sample(traj, world, cs, "s" + std::to_string(t)));
    }
    const bool same = all == merged;
    ok &= same;
    detail << "merge equivalence " << (same ? "ok" : "FAILS");

    // largest weak component against the union-find oracle
    UnionFind oracle;
    for (const auto& [key, node] : all.nodes()) oracle.add(key);
    for (const auto& [edge, count] : all.edges()) oracle.unite(edge.first, edge.second);
    graph::CollectiveGraph kept = graph::largest_weakly_connected_component(all);
    std::set<std::string> actual;
    for (const auto& [key, node] : kept.nodes()) actual.insert(key);
    const bool comp_ok = actual == oracle.largest_component();
    ok &= comp_ok;
    detail << ", component " << (comp_ok ? "ok" : "FAILS");
  }

  {  // k-means four-pair fixture against the exhaustive optimum
    Matrix points(8, 2);
    const double centers[4][2] = {{0, 0}, {10, 0}, {0, 10}, {10, 10}};
    for (int p = 0; p < 4; ++p) {
      points(2 * p, 0) = centers[p][0] - 0.1;
      points(2 * p, 1) = centers[p][1];
      points(2 * p + 1, 0) = centers[p][0] + 0.1;
      points(2 * p + 1, 1) = centers[p][1];
    }
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int code = 0; code < 65536; ++code) {
      int c = code;
      int assign[8];
      std::set<int> used;
      for (int i = 0; i < 8; ++i) {
        assign[i] = c & 3;
        used.insert(c & 3);
        c >>= 2;
      }
      if (used.size() != 4) continue;
      double cx[4] = {}, cy[4] = {};
      int counts[4] = {};
      for (int i = 0; i < 8; ++i) {
        cx[assign[i]] += points(i, 0);
        cy[assign[i]] += points(i, 1);
        counts[assign[i]] += 1;
      }
      double inertia = 0.0;
      for (int i = 0; i < 8; ++i) {
        const double dx = points(i, 0) - cx[assign[i]] / counts[assign[i]];
        const double dy = points(i, 1) - cy[assign[i]] / counts[assign[i]];
        inertia += dx * dx + dy * dy;
      }
      best_inertia = std::min(best_inertia, inertia);
    }
    auto result = analysis::kmeans(points, 4, 17, 8);
    const bool km_ok = std::abs(result.inertia - best_inertia) < 1e-9;
    ok &= km_ok;
    detail << ", k-means fixture " << (km_ok ? "ok" : "FAILS");
  }

  {  // success probabilities against a direct counting oracle, 20 trajectories
    graph::CollectiveGraph g;
    std::map<std::string, std::pair<long, long>> oracle;  // key -> (successes, total)
    Rng rng(71);
    for (int s = 0; s < 20; ++s) {
      const int len = 2 + rng.uniform_int(6);
      std::vector<std::string> keys;
      std::vector<codec::StateTensor> tensors;
      for (int i = 0; i < len; ++i) {
        codec::StateTensor tensor;
        tensor.encoding = codec::Encoding::Float;
        tensor.record_width = 4;
        tensor.values = {(1 + rng.uniform_int(12)) / 13.0, 0.5, 0.0, 0.0};
        keys.push_back(codec::tensor_key(tensor));
        tensors.push_back(std::move(tensor));
      }
      graph::TrajectoryRecord record;
      record.sim_id = "s" + std::to_string(s);
      record.decided = rng.bernoulli(0.8);
      record.best_site = 0;
      record.chosen_site = record.decided ? rng.uniform_int(2) : -1;
      g.add_encoded_trajectory(keys, tensors, record);

      const bool successful = record.decided && record.chosen_site == 0;
      std::set<std::string> unique(keys.begin(), keys.end());
      for (const auto& key : unique) {
        auto& counts = oracle[key];
        counts.second += 1;
        if (successful) counts.first += 1;
      }
    }
    auto stats = analysis::success_probability(g);
    bool match = stats.per_node.size() == oracle.size();
    for (const auto& [key, counts] : oracle) {
      const auto it = stats.per_node.find(key);
      if (it == stats.per_node.end() || it->second.on_successful != counts.first ||
          it->second.on_any != counts.second ||
          it->second.probability !=
              static_cast<double>(counts.first) / static_cast<double>(counts.second)) {
        match = false;
      }
    }
    ok &= match;
    detail << ", success counting " << (match ? "ok" : "FAILS");
  }

  return {ok, detail.str()};
}

// ---- 9. Codec invariance -------------------------------------------------

Verdict criterion_codec() {
  Rng rng(2718);
  long checked = 0;
  bool ok = true;
  std::ostringstream detail;
  for (int round = 0; round < 10000 && ok; ++round) {
    const int num_sites = 2 + rng.uniform_int(3);
    std::vector<double> qualities;
    for (int s = 0; s < num_sites; ++s) qualities.push_back(rng.uniform(0.51, 1.0));
    const int agents = 1 + rng.uniform_int(10);
    WorldConfig world =
        make_world(agents, num_sites, 100.0 + rng.uniform_int(3) * 50.0, qualities, 100,
                   mix64(11, round));
    Snapshot colony = make_initial_condition(InitialConditionKind::RandomStates, world, rng);

    Snapshot shuffled = colony;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1],
                shuffled[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);
    }

    const auto tensor = codec::encode_float(colony, world);
    const auto tensor_shuffled = codec::encode_float(shuffled, world);
    if (!(tensor == tensor_shuffled)) {
      ok = false;
      detail << "float tensor differs under permutation at round " << round;
      break;
    }
    if (tensor.values.size() != 40) {
      ok = false;
      detail << "float tensor length " << tensor.values.size() << " at round " << round;
      break;
    }
    for (int r = agents; r < 10; ++r) {
      const double* row = tensor.values.data() + r * 4;
      if (row[0] != 0.0 || row[1] != 1.0 || row[2] != 1.0 || row[3] != 1.0) {
        ok = false;
        detail << "bad padding row at round " << round;
        break;
      }
    }
    const auto onehot = codec::encode_onehot_tensor(colony, world);
    if (!(onehot == codec::encode_onehot_tensor(shuffled, world))) {
      ok = false;
      detail << "one-hot tensor differs under permutation at round " << round;
      break;
    }
    ++checked;
  }
  if (ok) detail << checked << " random snapshots: permutation-invariant, 40 values, exact padding";
  return {ok, detail.str()};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "determinism of every seeded stage", criterion_determinism},
      {2, "analytic gradients match finite differences", criterion_gradients},
      {3, "reconstruction training halves the loss and ranks edges", criterion_training},
      {4, "convergence time rises with site distance", criterion_time_trend},
      {5, "success is U-shaped over quality difference", criterion_success_shape},
      {6, "two-site setup picks the best site 55-85% of the time", criterion_small_setup},
      {7, "success/failure embeddings separate in 3D", criterion_label_separation},
      {8, "graph, clustering, and counting oracles agree", criterion_oracles},
      {9, "tensor codec invariants over random snapshots", criterion_codec},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = criterion.run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", verdict.pass ? "PASS" : "FAIL",
                criterion.number, criterion.name, verdict.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!verdict.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
