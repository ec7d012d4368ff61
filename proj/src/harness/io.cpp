#include "bestofn/harness/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bestofn/abm/model.hpp"
#include "bestofn/core/hash.hpp"
#include "bestofn/core/text.hpp"

namespace bestofn::harness {

using nlohmann::json;

namespace {

json agent_to_json(const abm::Agent& agent) {
  json j{{"id", agent.id},
         {"state", abm::to_string(agent.state)},
         {"x", agent.position.x},
         {"y", agent.position.y},
         {"reassess", agent.reassess_remaining}};
  if (agent.favored_site) {
    j["site"] = *agent.favored_site;
  } else {
    j["site"] = nullptr;
  }
  return j;
}

abm::Agent agent_from_json(const json& j) {
  abm::Agent agent;
  agent.id = j.at("id").get<int>();
  auto state = abm::agent_state_from_string(j.at("state").get<std::string>());
  if (!state) throw std::runtime_error("trajectory: unknown agent state");
  agent.state = *state;
  agent.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  agent.reassess_remaining = j.at("reassess").get<int>();
  if (!j.at("site").is_null()) agent.favored_site = j.at("site").get<int>();
  return agent;
}

json world_to_json(const abm::WorldConfig& world) {
  json sites = json::array();
  for (const auto& s : world.sites) {
    sites.push_back({{"id", s.id}, {"x", s.position.x}, {"y", s.position.y}, {"q", s.quality}});
  }
  json j{{"hub_x", world.hub.x},
         {"hub_y", world.hub.y},
         {"max_distance", world.max_distance},
         {"sites", sites},
         {"num_agents", world.num_agents},
         {"quorum_fraction", world.quorum_fraction},
         {"max_ticks", world.max_ticks},
         {"agent_speed", world.agent_speed},
         {"site_radius", world.site_radius},
         {"rng_seed", world.rng_seed}};
  if (world.quorum_count) j["quorum_count"] = *world.quorum_count;
  return j;
}

abm::WorldConfig world_from_json(const json& j) {
  abm::WorldConfig world;
  world.hub = {j.at("hub_x").get<double>(), j.at("hub_y").get<double>()};
  world.max_distance = j.at("max_distance").get<double>();
  for (const auto& s : j.at("sites")) {
    abm::Site site;
    site.id = s.at("id").get<int>();
    site.position = {s.at("x").get<double>(), s.at("y").get<double>()};
    site.quality = s.at("q").get<double>();
    world.sites.push_back(site);
  }
  world.num_agents = j.at("num_agents").get<int>();
  world.quorum_fraction = j.at("quorum_fraction").get<double>();
  world.max_ticks = j.at("max_ticks").get<long>();
  world.agent_speed = j.at("agent_speed").get<double>();
  world.site_radius = j.at("site_radius").get<double>();
  world.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (j.contains("quorum_count")) world.quorum_count = j.at("quorum_count").get<int>();
  return world;
}

}  // namespace

void write_trajectory_jsonl(const abm::Trajectory& trajectory, const abm::WorldConfig& world,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file " + path);
  for (std::size_t tick = 0; tick < trajectory.snapshots.size(); ++tick) {
    const auto& snapshot = trajectory.snapshots[tick];
    json agents = json::array();
    for (const auto& agent : snapshot) agents.push_back(agent_to_json(agent));
    json line{{"tick", tick}, {"agents", agents}};
    auto quorum = abm::check_quorum(snapshot, world);
    line["quorum"] = quorum ? json(*quorum) : json(nullptr);
    out << line.dump() << "\n";
  }
}

abm::Trajectory read_trajectory_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trajectory file " + path);
  abm::Trajectory traj;
  std::string line;
  std::optional<int> last_quorum;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    abm::Snapshot snapshot;
    for (const auto& a : j.at("agents")) snapshot.push_back(agent_from_json(a));
    traj.snapshots.push_back(std::move(snapshot));
    last_quorum.reset();
    if (!j.at("quorum").is_null()) last_quorum = j.at("quorum").get<int>();
  }
  if (traj.snapshots.empty()) throw std::runtime_error("trajectory file is empty: " + path);
  traj.ticks_elapsed = static_cast<long>(traj.snapshots.size()) - 1;
  traj.outcome = last_quorum ? abm::Outcome::decided_for(*last_quorum) : abm::Outcome::timed_out();
  return traj;
}

void write_trial_meta(const TrialMeta& meta, const std::string& path) {
  json j{{"sim_id", meta.sim_id},
         {"seed", meta.seed},
         {"world", world_to_json(meta.world)},
         {"init_index", meta.init_index},
         {"rep", meta.rep},
         {"decided", meta.outcome.decided},
         {"chosen_site", meta.outcome.site},
         {"ticks_elapsed", meta.ticks_elapsed}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write meta file " + path);
  out << j.dump(2) << "\n";
}

TrialMeta read_trial_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read meta file " + path);
  json j = json::parse(in);
  TrialMeta meta;
  meta.sim_id = j.at("sim_id").get<std::string>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.world = world_from_json(j.at("world"));
  meta.init_index = j.at("init_index").get<int>();
  meta.rep = j.at("rep").get<int>();
  meta.outcome.decided = j.at("decided").get<bool>();
  meta.outcome.site = j.at("chosen_site").get<int>();
  meta.ticks_elapsed = j.at("ticks_elapsed").get<long>();
  return meta;
}

void save_graph(const graph::CollectiveGraph& g, codec::Encoding encoding,
                const std::string& path) {
  json nodes = json::array();
  for (const auto& [key, node] : g.nodes()) {
    json n{{"key", key}, {"tensor", node.tensor.values}, {"visits", node.visit_count}};
    if (node.label) n["label"] = graph::to_string(*node.label);
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& [edge, count] : g.edges()) {
    edges.push_back({{"src", edge.first}, {"dst", edge.second}, {"count", count}});
  }
  json trajectories = json::array();
  for (const auto& record : g.trajectories()) {
    trajectories.push_back({{"sim", record.sim_id},
                            {"keys", record.keys},
                            {"decided", record.decided},
                            {"chosen_site", record.chosen_site},
                            {"best_site", record.best_site},
                            {"ticks", record.ticks}});
  }
  json j{{"format_version", 1},
         {"encoding", codec::to_string(encoding)},
         {"record_width", encoding == codec::Encoding::Float ? codec::kFloatWidth
                                                             : codec::kOneHotWidth},
         {"nodes", nodes},
         {"edges", edges},
         {"trajectories", trajectories}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path);
  out << j.dump() << "\n";
}

std::pair<graph::CollectiveGraph, codec::Encoding> load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read graph file " + path);
  json j = json::parse(in);
  if (j.at("format_version").get<int>() != 1) {
    throw std::runtime_error("unsupported graph format version in " + path);
  }
  const std::string enc_name = j.at("encoding").get<std::string>();
  const codec::Encoding encoding =
      enc_name == "onehot" ? codec::Encoding::OneHot : codec::Encoding::Float;
  const int width = j.at("record_width").get<int>();

  graph::CollectiveGraph g;
  for (const auto& n : j.at("nodes")) {
    codec::StateTensor tensor;
    tensor.encoding = encoding;
    tensor.record_width = width;
    tensor.values = n.at("tensor").get<std::vector<double>>();
    const std::string key = n.at("key").get<std::string>();
    g.touch_node(key, tensor);
    auto& node = g.node_at(key);
    node.visit_count = n.at("visits").get<long>();
    if (n.contains("label")) node.label = graph::node_label_from_string(n.at("label").get<std::string>());
  }
  for (const auto& e : j.at("edges")) {
    g.add_edge(e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
               e.at("count").get<long>());
  }
  for (const auto& t : j.at("trajectories")) {
    graph::TrajectoryRecord record;
    record.sim_id = t.at("sim").get<std::string>();
    record.keys = t.at("keys").get<std::vector<std::string>>();
    record.decided = t.at("decided").get<bool>();
    record.chosen_site = t.at("chosen_site").get<int>();
    record.best_site = t.at("best_site").get<int>();
    record.ticks = t.at("ticks").get<long>();
    g.add_trajectory_record(std::move(record));
  }
  return {std::move(g), encoding};
}

void write_metrics_csv(const std::vector<analysis::RunMetrics>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics file " + path);
  out << "sim_id,distance,qualities,quality_diff,max_quality,decided,chosen_site,success,"
         "ticks,runtime_ticks\n";
  for (const auto& row : rows) {
    std::vector<std::string> quals;
    for (double q : row.qualities) quals.push_back(format_double(q));
    out << row.sim_id << ',' << format_double(row.site_distance) << ',' << join(quals, ';') << ','
        << format_double(row.quality_diff()) << ',' << format_double(row.max_quality()) << ','
        << (row.chosen_site ? "true" : "false") << ','
        << (row.chosen_site ? std::to_string(*row.chosen_site) : "") << ','
        << (row.success ? format_double(*row.success) : "") << ','
        << (row.ticks_to_converge ? std::to_string(*row.ticks_to_converge) : "") << ','
        << row.runtime_ticks << "\n";
  }
}

std::vector<analysis::RunMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read metrics file " + path);
  std::vector<analysis::RunMetrics> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 10) throw std::runtime_error("metrics row has wrong column count");
    analysis::RunMetrics row;
    row.sim_id = cols[0];
    row.site_distance = std::stod(cols[1]);
    for (const auto& q : split(cols[2], ';')) row.qualities.push_back(std::stod(q));
    const bool decided = cols[5] == "true";
    if (decided) {
      row.chosen_site = std::stoi(cols[6]);
      row.success = std::stod(cols[7]);
      row.ticks_to_converge = std::stol(cols[8]);
    }
    row.runtime_ticks = std::stol(cols[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

Manifest::Manifest(std::filesystem::path root) : root_(std::move(root)) {
  const auto path = root_ / "manifest.json";
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    json j = json::parse(in);
    for (const auto& f : j.at("files")) {
      entries_[f.at("path").get<std::string>()] = f.at("fnv1a64").get<std::string>();
    }
  }
}

void Manifest::record(const std::string& relative) {
  entries_[relative] = hash_file(root_ / relative);
}

void Manifest::save() const {
  json files = json::array();
  for (const auto& [path, hash] : entries_) {
    files.push_back({{"path", path}, {"fnv1a64", hash}});
  }
  json j{{"format_version", 1}, {"files", files}};
  std::ofstream out(root_ / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest");
  out << j.dump(2) << "\n";
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file " + path.string());
  Fnv1a64 hash;
  char buffer[65536];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    hash.update(buffer, static_cast<std::size_t>(in.gcount()));
  }
  return hash.hex();
}

}  // namespace bestofn::harness
