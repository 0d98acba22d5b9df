#include <benchmark/benchmark.h>

#include "mlwsbm/baselines.hpp"
#include "mlwsbm/generator.hpp"
#include "mlwsbm/inference.hpp"
#include "mlwsbm/selection.hpp"

#include <random>

using namespace mlwsbm;

namespace {

struct PlantedPair {
  MultilayerGraph graph;
  CommunityStructure truth;
};

PlantedPair make_planted(int n, double q_prime) {
  GeneratorConfig config;
  config.n = n;
  config.num_layers = 2;
  config.k_shared = 2;
  config.k_total = {4, 4};
  config.families = {WeightFamily(FamilyKind::Bernoulli), WeightFamily(FamilyKind::Bernoulli)};
  config.theta = {planted_theta(0.6, 0.2, 4), planted_theta(0.6, q_prime, 4)};
  std::mt19937_64 rng(12345);
  PlantedPair p;
  p.truth = sample_labels(config, rng);
  p.graph = sample_graph(config, p.truth, rng);
  return p;
}

VariationalState make_state(const MultilayerGraph& g) {
  InferenceOptions opt;
  opt.init = InitMode::Random;
  std::mt19937_64 rng(7);
  return init_state(g, 2, {4, 4}, opt, rng);
}

}  // namespace

static void BM_UpdateTau(benchmark::State& state) {
  const PlantedPair p = make_planted(static_cast<int>(state.range(0)), 0.3);
  VariationalState st = make_state(p.graph);
  for (auto _ : state) {
    update_tau(st, p.graph);
    benchmark::DoNotOptimize(st.tau);
  }
}
BENCHMARK(BM_UpdateTau)->Arg(100)->Arg(250)->Arg(500);

static void BM_InnerMuSweep(benchmark::State& state) {
  const PlantedPair p = make_planted(static_cast<int>(state.range(0)), 0.3);
  VariationalState st = make_state(p.graph);
  update_tau(st, p.graph);
  for (auto _ : state) {
    update_mu_shared(st, p.graph);
    update_mu_private(st, p.graph);
    normalize_mu(st);
    benchmark::DoNotOptimize(st.mu);
  }
}
BENCHMARK(BM_InnerMuSweep)->Arg(100)->Arg(250)->Arg(500);

static void BM_Elbo(benchmark::State& state) {
  const PlantedPair p = make_planted(static_cast<int>(state.range(0)), 0.3);
  VariationalState st = make_state(p.graph);
  update_tau(st, p.graph);
  for (auto _ : state) benchmark::DoNotOptimize(elbo(st, p.graph));
}
BENCHMARK(BM_Elbo)->Arg(100)->Arg(250)->Arg(500);

static void BM_JointFit(benchmark::State& state) {
  const PlantedPair p = make_planted(static_cast<int>(state.range(0)), 0.3);
  InferenceOptions opt;
  opt.restarts = 1;
  opt.seed = 99;
  for (auto _ : state) {
    const FitResult fit = run(p.graph, 2, {4, 4}, opt);
    benchmark::DoNotOptimize(fit.labels);
  }
}
BENCHMARK(BM_JointFit)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

static void BM_SpectralClustering(benchmark::State& state) {
  const PlantedPair p = make_planted(static_cast<int>(state.range(0)), 0.3);
  SpectralOptions so;
  so.k = 4;
  so.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_clustering(p.graph.layers[0], so));
}
BENCHMARK(BM_SpectralClustering)->Arg(100)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Nmi(benchmark::State& state) {
  const PlantedPair p = make_planted(500, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(nmi(p.truth.labels[0], p.truth.labels[1]));
}
BENCHMARK(BM_Nmi);

BENCHMARK_MAIN();
