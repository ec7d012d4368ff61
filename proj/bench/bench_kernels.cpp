// Timing comparison of the OpenMP kernels against their serial reference
// implementations: encoder pair loss/gradient, t-SNE affinities and
// gradient step, k-means assignment, and a batch of simulations.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bestofn/abm/simulation.hpp"
#include "bestofn/analysis/kmeans.hpp"
#include "bestofn/analysis/tsne.hpp"
#include "bestofn/core/rng.hpp"
#include "bestofn/encoder/loss.hpp"
#include "bestofn/encoder/train.hpp"

using namespace bestofn;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_ms(Fn&& fn, int repeats) {
  fn();  // warm up
  const double start = now_ms();
  for (int r = 0; r < repeats; ++r) fn();
  return (now_ms() - start) / repeats;
}

encoder::EncodedGraph random_graph(int n, int feature_dim, std::uint64_t seed) {
  Rng rng(seed);
  encoder::EncodedGraph g;
  g.n = n;
  g.features = Matrix(n, feature_dim);
  for (double& v : g.features.data) v = rng.uniform(-1.0, 1.0);
  g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
  g.neighbors.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(0.02)) {
        g.adjacency[static_cast<std::size_t>(i) * n + j] = 1;
        g.adjacency[static_cast<std::size_t>(j) * n + i] = 1;
        g.neighbors[static_cast<std::size_t>(i)].push_back(j);
        g.neighbors[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  return g;
}

void bench_pair_loss(int n) {
  auto graph = random_graph(n, 3, 7);
  Matrix embeddings = graph.features;
  Matrix grad;
  const double serial = time_ms(
      [&] { encoder::reference::reconstruction_loss_grad(embeddings, graph, grad); }, 3);
  const double parallel =
      time_ms([&] { encoder::reconstruction_loss_grad(embeddings, graph, grad); }, 3);
  std::printf("pair_loss_grad     n=%-6d serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", n,
              serial, parallel, serial / parallel);
}

void bench_tsne(int n) {
  Rng rng(11);
  Matrix points(n, 8);
  for (double& v : points.data) v = rng.uniform(0.0, 1.0);
  const double serial_aff =
      time_ms([&] { analysis::reference::tsne_affinities(points, 20.0); }, 2);
  const double parallel_aff = time_ms([&] { analysis::tsne_affinities(points, 20.0); }, 2);
  std::printf("tsne_affinities    n=%-6d serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", n,
              serial_aff, parallel_aff, serial_aff / parallel_aff);

  Matrix affinity = analysis::tsne_affinities(points, 20.0);
  Matrix embedding(n, 2);
  for (double& v : embedding.data) v = 1e-4 * rng.gaussian();
  analysis::TsneWorkspace work(n, 2);
  const double serial_step = time_ms(
      [&] { analysis::reference::tsne_gradient_step(affinity, embedding, work, 0.5, 200.0); }, 3);
  const double parallel_step = time_ms(
      [&] { analysis::tsne_gradient_step(affinity, embedding, work, 0.5, 200.0); }, 3);
  std::printf("tsne_step          n=%-6d serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", n,
              serial_step, parallel_step, serial_step / parallel_step);
}

void bench_kmeans(int n, int dims, int k) {
  Rng rng(13);
  Matrix points(n, dims);
  for (double& v : points.data) v = rng.uniform(0.0, 10.0);
  Matrix centroids(k, dims);
  for (double& v : centroids.data) v = rng.uniform(0.0, 10.0);
  std::vector<int> labels;
  const double serial =
      time_ms([&] { analysis::reference::assign_points(points, centroids, labels); }, 5);
  const double parallel = time_ms([&] { analysis::assign_points(points, centroids, labels); }, 5);
  std::printf("kmeans_assign      n=%-6d serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n", n,
              serial, parallel, serial / parallel);
}

void bench_simulations(int trials) {
  abm::WorldConfig world = abm::make_world(10, 2, 100.0, {0.9, 0.7}, 2000, 3);
  abm::TransitionParams params;
  Rng rng(5);
  const abm::Snapshot initial =
      abm::make_initial_condition(abm::InitialConditionKind::AllObserve, world, rng);
  abm::SimOptions options;
  options.record_snapshots = false;

  auto serial_run = [&] {
    for (int t = 0; t < trials; ++t) {
      abm::run_simulation(world, params, initial, 1000 + static_cast<std::uint64_t>(t), options);
    }
  };
  auto parallel_run = [&] {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
      abm::run_simulation(world, params, initial, 1000 + static_cast<std::uint64_t>(t), options);
    }
  };
  const double serial = time_ms(serial_run, 2);
  const double parallel = time_ms(parallel_run, 2);
  std::printf("simulation_batch   n=%-6d serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n",
              trials, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both columns run serial code\n");
#endif
  bench_pair_loss(1500);
  bench_tsne(1200);
  bench_kmeans(200000, 4, 8);
  bench_simulations(64);
  return 0;
}
