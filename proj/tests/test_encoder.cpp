#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bestofn/abm/simulation.hpp"
#include "bestofn/core/rng.hpp"
#include "bestofn/encoder/loss.hpp"
#include "bestofn/encoder/model.hpp"
#include "bestofn/encoder/train.hpp"

using namespace bestofn;
using namespace bestofn::encoder;

namespace {

EncodedGraph random_encoded_graph(int n, int dim, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  EncodedGraph g;
  g.n = n;
  g.features = Matrix(n, dim);
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
  for (int i = 0; i < n; ++i) g.order.push_back("n" + std::to_string(i));
  return g;
}

}  // namespace

TEST_CASE("edge score is a symmetric sigmoid of the dot product") {
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const std::vector<double> ones{1.0, 1.0, 1.0};
  const std::vector<double> ex{1.0, 0.0, 0.0};
  const std::vector<double> ey{0.0, 1.0, 0.0};
  CHECK(edge_score(zero, ones) == 0.5);
  CHECK(edge_score(ex, ey) == 0.5);
  CHECK(edge_score(ones, ones) == doctest::Approx(0.9525741268224331).epsilon(1e-12));
  CHECK(edge_score(ones, ex) == edge_score(ex, ones));
}

TEST_CASE("BCE with logits matches its closed forms") {
  CHECK(bce_with_logits(0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_with_logits(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_with_logits(20.0, 1.0) < 1e-8);
  CHECK(bce_with_logits(-20.0, 0.0) < 1e-8);

  // Stable form equals the naive sigmoid expression away from saturation.
  for (double logit = -15.0; logit <= 15.0; logit += 0.37) {
    for (double target : {0.0, 1.0}) {
      const double s = sigmoid(logit);
      const double naive = -(target * std::log(s) + (1.0 - target) * std::log(1.0 - s));
      CHECK(bce_with_logits(logit, target) == doctest::Approx(naive).epsilon(1e-9));
    }
  }
}

TEST_CASE("two zero embeddings over one edge lose exactly ln 2") {
  EncodedGraph g = random_encoded_graph(2, 3, 0.0, 1);
  g.adjacency = {0, 1, 1, 0};
  g.neighbors = {{1}, {0}};
  Matrix embeddings(2, 3);
  CHECK(reconstruction_loss(embeddings, g) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("all-zero weights embed everything at the origin") {
  EncoderModel model = init_model(3, 40, 20, 3);
  for (auto* m : {&model.conv1.w_self, &model.conv1.w_neigh, &model.conv2.w_self,
                  &model.conv2.w_neigh, &model.head_w, &model.res_w}) {
    m->fill(0.0);
  }
  EncodedGraph g = random_encoded_graph(6, 40, 0.4, 2);
  ForwardCache cache = sage_forward_cached(model, g.features, g.neighbors);
  for (double v : cache.out.data) CHECK(v == 0.0);
}

TEST_CASE("isolated nodes aggregate a zero neighborhood") {
  EncoderModel model = init_model(4, 40, 20, 3);
  EncodedGraph g = random_encoded_graph(1, 40, 0.0, 5);
  ForwardCache cache = sage_forward_cached(model, g.features, g.neighbors);

  // Hand-rolled forward with the neighbor term dropped.
  std::vector<double> h1(20), h2(20), out(3);
  for (int r = 0; r < 20; ++r) {
    double sum = model.conv1.bias[static_cast<std::size_t>(r)];
    for (int c = 0; c < 40; ++c) sum += model.conv1.w_self(r, c) * g.features(0, c);
    h1[static_cast<std::size_t>(r)] = std::max(0.0, sum);
  }
  for (int r = 0; r < 20; ++r) {
    double sum = model.conv2.bias[static_cast<std::size_t>(r)];
    for (int c = 0; c < 20; ++c) sum += model.conv2.w_self(r, c) * h1[static_cast<std::size_t>(c)];
    h2[static_cast<std::size_t>(r)] = std::max(0.0, sum);
  }
  for (int r = 0; r < 3; ++r) {
    double sum = model.head_b[static_cast<std::size_t>(r)] + model.res_b[static_cast<std::size_t>(r)];
    for (int c = 0; c < 20; ++c) sum += model.head_w(r, c) * h2[static_cast<std::size_t>(c)];
    for (int c = 0; c < 40; ++c) sum += model.res_w(r, c) * g.features(0, c);
    out[static_cast<std::size_t>(r)] = sum;
  }
  for (int r = 0; r < 3; ++r) {
    CHECK(cache.out(0, r) == doctest::Approx(out[static_cast<std::size_t>(r)]).epsilon(1e-12));
  }
}

TEST_CASE("identical nodes with identical neighborhoods embed identically") {
  EncoderModel model = init_model(6, 40, 20, 3);
  EncodedGraph g = random_encoded_graph(4, 40, 0.0, 6);
  // Nodes 0 and 1 share features and both neighbor node 2.
  for (int c = 0; c < 40; ++c) g.features(1, c) = g.features(0, c);
  g.neighbors = {{2}, {2}, {0, 1}, {}};
  ForwardCache cache = sage_forward_cached(model, g.features, g.neighbors);
  for (int c = 0; c < 3; ++c) CHECK(cache.out(0, c) == cache.out(1, c));
}

TEST_CASE("permutation equivariance is exact") {
  EncoderModel model = init_model(7, 40, 20, 3);
  EncodedGraph g = random_encoded_graph(9, 40, 0.3, 7);
  ForwardCache cache = sage_forward_cached(model, g.features, g.neighbors);

  // Reverse relabeling.
  const int n = g.n;
  EncodedGraph p;
  p.n = n;
  p.features = Matrix(n, 40);
  p.neighbors.resize(static_cast<std::size_t>(n));
  auto perm = [n](int i) { return n - 1 - i; };
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 40; ++c) p.features(perm(i), c) = g.features(i, c);
    for (int j : g.neighbors[static_cast<std::size_t>(i)]) {
      p.neighbors[static_cast<std::size_t>(perm(i))].push_back(perm(j));
    }
    std::sort(p.neighbors[static_cast<std::size_t>(perm(i))].begin(),
              p.neighbors[static_cast<std::size_t>(perm(i))].end());
  }
  ForwardCache permuted = sage_forward_cached(model, p.features, p.neighbors);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) CHECK(permuted.out(perm(i), c) == cache.out(i, c));
  }
}

TEST_CASE("sage_forward validates its adjacency") {
  EncoderModel model = init_model(8, 40, 20, 3);
  Matrix features(2, 40);
  SUBCASE("asymmetric") {
    std::vector<std::vector<double>> adj{{0.0, 1.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(sage_forward(model, features, adj), std::invalid_argument);
  }
  SUBCASE("nonzero diagonal") {
    std::vector<std::vector<double>> adj{{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(sage_forward(model, features, adj), std::invalid_argument);
  }
  SUBCASE("width mismatch") {
    Matrix narrow(2, 10);
    std::vector<std::vector<double>> adj{{0.0, 1.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(sage_forward(model, narrow, adj), std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match central differences") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    EncoderModel model = init_model(seed, 40, 20, 3);
    EncodedGraph g = random_encoded_graph(10, 40, 0.3, 100 + seed);
    const double err = gradient_check(model, g, 1e-5);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gradient_check validates epsilon") {
  EncoderModel model = init_model(1, 40, 20, 3);
  EncodedGraph g = random_encoded_graph(4, 40, 0.5, 9);
  CHECK_THROWS_AS(gradient_check(model, g, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(gradient_check(model, g, 1e-2), std::invalid_argument);
}

TEST_CASE("training with zero learning rate changes nothing") {
  EncoderModel model = init_model(11, 40, 20, 3);
  const EncoderModel before = model;
  std::vector<EncodedGraph> subgraphs{random_encoded_graph(8, 40, 0.3, 10)};
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  TrainResult result = train(std::move(model), subgraphs, cfg);
  CHECK(result.loss_history.size() == 1);
  CHECK(result.model == before);
}

TEST_CASE("training is deterministic given the seed") {
  std::vector<EncodedGraph> subgraphs{random_encoded_graph(12, 40, 0.25, 11),
                                      random_encoded_graph(9, 40, 0.35, 12)};
  TrainConfig cfg;
  cfg.epochs = 25;
  TrainResult a = train(init_model(21, 40, 20, 3), subgraphs, cfg);
  TrainResult b = train(init_model(21, 40, 20, 3), subgraphs, cfg);
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t e = 0; e < a.loss_history.size(); ++e) {
    CHECK(a.loss_history[e] == b.loss_history[e]);  // bit identical
  }
  CHECK(a.model == b.model);
}

TEST_CASE("training on a learnable subgraph reduces its loss") {
  // Two feature clusters; edges only inside a cluster.
  Rng rng(13);
  const int n = 30;
  EncodedGraph g;
  g.n = n;
  g.features = Matrix(n, 40);
  for (int i = 0; i < n; ++i) {
    const double base = i < n / 2 ? 0.0 : 1.0;
    for (int c = 0; c < 40; ++c) g.features(i, c) = base + 0.05 * rng.uniform(-1.0, 1.0);
  }
  g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
  g.neighbors.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same_cluster = (i < n / 2) == (j < n / 2);
      if (same_cluster && rng.bernoulli(0.4)) {
        g.adjacency[static_cast<std::size_t>(i) * n + j] = 1;
        g.adjacency[static_cast<std::size_t>(j) * n + i] = 1;
        g.neighbors[static_cast<std::size_t>(i)].push_back(j);
        g.neighbors[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  std::vector<EncodedGraph> subgraphs{g};
  TrainConfig cfg;
  cfg.epochs = 200;
  TrainResult result = train(init_model(31, 40, 20, 3), subgraphs, cfg);
  CHECK(result.loss_history.back() <= 0.5 * result.loss_history.front());
  CHECK(edge_auc(result.model, subgraphs) > 0.8);
}

TEST_CASE("train input validation") {
  TrainConfig cfg;
  CHECK_THROWS_AS(train(init_model(1), {}, cfg), std::invalid_argument);
  std::vector<EncodedGraph> tiny{random_encoded_graph(1, 40, 0.0, 14)};
  CHECK_THROWS_AS(train(init_model(1), tiny, cfg), std::invalid_argument);
}

TEST_CASE("model files round-trip exactly") {
  EncoderModel model = init_model(99, 40, 20, 3);
  const std::string path = "test_model_roundtrip.json";
  save_model(model, path);
  EncoderModel restored = load_model(path);
  CHECK(restored == model);
  std::remove(path.c_str());
}

TEST_CASE("embedding a graph is pure and keyed by node") {
  EncoderModel model = init_model(41, 40, 20, 3);
  graph::CollectiveGraph g;
  abm::WorldConfig world = abm::make_world(10, 2, 100.0, {0.9, 0.7}, 200, 50);
  abm::TransitionParams params;
  Rng rng(51);
  const abm::Snapshot init =
      abm::make_initial_condition(abm::InitialConditionKind::HalfExploreHalfObserve, world, rng);
  const abm::Trajectory traj = abm::run_simulation(world, params, init, 52);
  g.add_trajectory(traj, world, graph::CodecSettings{}, "sim0");

  const auto once = embed_graph(model, g);
  const auto twice = embed_graph(model, g);
  REQUIRE(once.size() == g.node_count());
  for (const auto& [key, e] : once) {
    CHECK(twice.at(key) == e);  // bit-for-bit purity
  }

  SUBCASE("width mismatches are rejected") {
    graph::CollectiveGraph onehot;
    abm::Trajectory t2 = traj;
    graph::CodecSettings settings;
    settings.encoding = codec::Encoding::OneHot;
    onehot.add_trajectory(t2, world, settings, "sim0");
    CHECK_THROWS_AS(embed_graph(model, onehot), std::invalid_argument);
  }
}
