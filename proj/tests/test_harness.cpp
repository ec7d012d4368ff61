#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <set>

#include "bestofn/harness/campaign.hpp"
#include "bestofn/harness/config.hpp"
#include "bestofn/harness/io.hpp"
#include "bestofn/harness/pipeline.hpp"

using namespace bestofn;
using namespace bestofn::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CampaignConfig tiny_config() {
  CampaignConfig cfg;
  cfg.runtimes = {300};
  cfg.site_distances = {100.0};
  cfg.agent_counts = {5};
  cfg.site_counts = {2};
  cfg.fixed_qualities = {0.9, 0.7};
  cfg.repetitions = 2;
  cfg.initial_pool_size = 4;
  cfg.seed = 7;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("campaign config round-trips through its text form") {
  TempDir tmp("bestofn_cfg_test");
  CampaignConfig cfg = tiny_config();
  cfg.p1 = 0.05;
  cfg.quorum_count = 3;
  cfg.tensor_encoding = codec::Encoding::OneHot;
  const std::string path = (tmp.path / "c.cfg").string();
  write_campaign_config(cfg, path);
  const CampaignConfig back = parse_campaign_config(path);
  CHECK(back.p1 == cfg.p1);
  CHECK(back.quorum_count == cfg.quorum_count);
  CHECK(back.tensor_encoding == codec::Encoding::OneHot);
  CHECK(back.runtimes == cfg.runtimes);
  CHECK(back.fixed_qualities == cfg.fixed_qualities);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("config parser rejects unknown keys and junk") {
  TempDir tmp("bestofn_cfg_bad");
  {
    std::ofstream out(tmp.path / "bad1.cfg");
    out << "p1 = 0.1\nnot_a_key = 3\n";
  }
  CHECK_THROWS_WITH_AS(parse_campaign_config((tmp.path / "bad1.cfg").string()),
                       doctest::Contains("unknown key"), std::runtime_error);
  {
    std::ofstream out(tmp.path / "bad2.cfg");
    out << "p1 0.1\n";
  }
  CHECK_THROWS_AS(parse_campaign_config((tmp.path / "bad2.cfg").string()), std::runtime_error);
  {
    std::ofstream out(tmp.path / "bad3.cfg");
    out << "p1 = smoke\n";
  }
  CHECK_THROWS_AS(parse_campaign_config((tmp.path / "bad3.cfg").string()), std::runtime_error);
  CHECK_THROWS_AS(parse_campaign_config((tmp.path / "missing.cfg").string()), std::runtime_error);
}

TEST_CASE("trial seeds depend only on trial identity") {
  CampaignConfig cfg = tiny_config();
  const auto cells = enumerate_cells(cfg);
  REQUIRE(cells.size() == 1);
  const std::uint64_t seed_a = trial_seed(cfg.seed, cells[0], 3, 1);

  // A larger grid containing the same cell yields the same seed.
  CampaignConfig wider = cfg;
  wider.runtimes = {300, 600};
  wider.site_distances = {100.0, 150.0};
  const auto more_cells = enumerate_cells(wider);
  REQUIRE(more_cells.size() == 4);
  bool found = false;
  for (const auto& cell : more_cells) {
    if (cell.id() == cells[0].id()) {
      CHECK(trial_seed(cfg.seed, cell, 3, 1) == seed_a);
      found = true;
    }
  }
  CHECK(found);
  CHECK(trial_seed(cfg.seed, cells[0], 3, 2) != seed_a);
  CHECK(trial_seed(cfg.seed, cells[0], 4, 1) != seed_a);
  CHECK(trial_seed(cfg.seed + 1, cells[0], 3, 1) != seed_a);
}

TEST_CASE("quality vectors obey the pairwise constraints") {
  CampaignConfig cfg;
  cfg.seed = 99;
  cfg.quality_vectors = 5;
  for (int n : {2, 3, 4}) {
    const auto vectors = sample_quality_vectors(cfg, n);
    REQUIRE(vectors.size() == 5);
    for (const auto& v : vectors) {
      REQUIRE(static_cast<int>(v.size()) == n);
      for (std::size_t a = 0; a < v.size(); ++a) {
        CHECK(v[a] > 0.5);
        CHECK(v[a] <= 1.0);
        for (std::size_t b = a + 1; b < v.size(); ++b) {
          CHECK(std::abs(v[a] - v[b]) < 0.5);
        }
      }
    }
    CHECK(sample_quality_vectors(cfg, n) == vectors);  // seeded determinism
  }
}

TEST_CASE("initial pools are deterministic and validate their size") {
  CampaignConfig cfg = tiny_config();
  abm::WorldConfig world = cfg.world_for(5, 2, 100.0, {0.9, 0.7}, 1000, 3);
  const auto pool_a =
      build_initial_pool(world, cfg.transition_params(), codec::Encoding::Float, 10, 11);
  const auto pool_b =
      build_initial_pool(world, cfg.transition_params(), codec::Encoding::Float, 10, 11);
  REQUIRE(pool_a.size() == 10);
  CHECK(pool_a == pool_b);

  // Distinctness: every pooled snapshot encodes to a unique tensor.
  std::set<std::string> keys;
  for (const auto& snapshot : pool_a) {
    keys.insert(codec::tensor_key(codec::encode_float(snapshot, world)));
  }
  CHECK(keys.size() == pool_a.size());

  // Frozen dynamics cannot produce ten distinct snapshots.
  abm::WorldConfig dead_world = cfg.world_for(5, 2, 100.0, {0.9, 0.7}, 3, 3);
  abm::TransitionParams dead = cfg.transition_params();
  dead.p_observe_explore = 0.0;
  dead.p_explore_return = 0.0;
  CHECK_THROWS_WITH_AS(build_initial_pool(dead_world, dead, codec::Encoding::Float, 10, 11),
                       doctest::Contains("distinct snapshots"), std::runtime_error);
}

TEST_CASE("snapshot rebinding targets the new world's sites") {
  CampaignConfig cfg = tiny_config();
  abm::WorldConfig near = cfg.world_for(5, 2, 100.0, {0.9, 0.7}, 1000, 3);
  abm::WorldConfig far = cfg.world_for(5, 2, 200.0, {0.8, 0.6}, 1000, 5);

  abm::Snapshot colony;
  abm::Agent assessor;
  assessor.id = 0;
  assessor.state = abm::AgentState::Assess;
  assessor.favored_site = 1;
  assessor.reassess_remaining = 2;
  assessor.position = near.site(1).position;
  colony.push_back(assessor);
  for (int i = 1; i < 5; ++i) {
    abm::Agent o;
    o.id = i;
    o.position = near.hub;
    colony.push_back(o);
  }

  const abm::Snapshot rebound = rebind_snapshot(colony, far);
  CHECK(rebound[0].position == far.site(1).position);
  validate_colony(rebound, far);
}

TEST_CASE("a tiny campaign runs end to end and reproduces byte-identically") {
  TempDir tmp_a("bestofn_campaign_a");
  TempDir tmp_b("bestofn_campaign_b");
  const CampaignConfig cfg = tiny_config();

  const CampaignResult res_a = run_campaign(cfg, tmp_a.path.string());
  CHECK(res_a.trials.size() == 1 * 4 * 2);  // one cell, pool of 4, two reps
  CHECK(fs::exists(tmp_a.path / "metrics.csv"));
  CHECK(fs::exists(tmp_a.path / "manifest.json"));
  CHECK(fs::exists(tmp_a.path / "config.echo.cfg"));

  // Every trial produced a trajectory and meta file, all in the manifest.
  Manifest manifest(tmp_a.path);
  for (const auto& trial : res_a.trials) {
    CHECK(fs::exists(tmp_a.path / trial.directory() / "trajectory.jsonl"));
    CHECK(manifest.entries().count(trial.directory() + "/trajectory.jsonl") == 1);
    CHECK(manifest.entries().count(trial.directory() + "/meta.json") == 1);
  }

  const CampaignResult res_b = run_campaign(cfg, tmp_b.path.string());
  CHECK(slurp(tmp_a.path / "metrics.csv") == slurp(tmp_b.path / "metrics.csv"));
  for (const auto& trial : res_a.trials) {
    CHECK(slurp(tmp_a.path / trial.directory() / "trajectory.jsonl") ==
          slurp(tmp_b.path / trial.directory() / "trajectory.jsonl"));
  }

  SUBCASE("trajectory logs round-trip") {
    const auto& trial = res_a.trials.front();
    const TrialMeta meta =
        read_trial_meta((tmp_a.path / trial.directory() / "meta.json").string());
    const abm::Trajectory traj =
        read_trajectory_jsonl((tmp_a.path / trial.directory() / "trajectory.jsonl").string());
    CHECK(traj.ticks_elapsed == meta.ticks_elapsed);
    CHECK(traj.outcome == meta.outcome);
    CHECK(traj.snapshots.size() == static_cast<std::size_t>(meta.ticks_elapsed) + 1);
    for (const auto& snapshot : traj.snapshots) {
      CHECK(snapshot.size() == 5);
    }
  }

  SUBCASE("metrics round-trip") {
    const auto rows = read_metrics_csv((tmp_a.path / "metrics.csv").string());
    REQUIRE(rows.size() == res_a.metrics.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].sim_id == res_a.metrics[i].sim_id);
      CHECK(rows[i].qualities == res_a.metrics[i].qualities);
      CHECK(rows[i].success == res_a.metrics[i].success);
      CHECK(rows[i].ticks_to_converge == res_a.metrics[i].ticks_to_converge);
    }
  }
}

TEST_CASE("graph stage composes on simulate output") {
  TempDir tmp("bestofn_pipeline_graph");
  CampaignConfig cfg = tiny_config();
  run_campaign(cfg, tmp.path.string());

  PipelineOptions opts;
  opts.out_dir = tmp.path.string();
  CHECK(cmd_graph(opts) == 0);
  CHECK(fs::exists(tmp.path / "graphs" / "merged.json"));

  auto [merged, encoding] = load_graph((tmp.path / "graphs" / "merged.json").string());
  CHECK(encoding == codec::Encoding::Float);
  CHECK(merged.node_count() > 0);
  CHECK(merged.trajectories().size() == 8);

  // Graph files round-trip exactly.
  const std::string again = (tmp.path / "graphs" / "roundtrip.json").string();
  save_graph(merged, encoding, again);
  auto [back, enc2] = load_graph(again);
  CHECK(back == merged);
  CHECK(back.trajectories().size() == merged.trajectories().size());

  SUBCASE("train refuses when no subgraphs exist") {
    PipelineOptions empty;
    TempDir other("bestofn_empty_out");
    empty.out_dir = other.path.string();
    CHECK(cmd_train(empty) != 0);
    CHECK(cmd_graph(empty) != 0);
    CHECK(cmd_embed(empty) != 0);
    CHECK(cmd_analyze(empty) != 0);
    CHECK(cmd_export(empty) != 0);
  }
}

TEST_CASE("manifest records content hashes") {
  TempDir tmp("bestofn_manifest");
  {
    std::ofstream out(tmp.path / "a.txt");
    out << "hello";
  }
  Manifest manifest(tmp.path);
  manifest.record("a.txt");
  manifest.save();
  CHECK(fs::exists(tmp.path / "manifest.json"));

  Manifest reloaded(tmp.path);
  REQUIRE(reloaded.entries().count("a.txt") == 1);
  CHECK(reloaded.entries().at("a.txt") == hash_file(tmp.path / "a.txt"));
  CHECK_THROWS_AS(hash_file(tmp.path / "nope.txt"), std::runtime_error);
}
