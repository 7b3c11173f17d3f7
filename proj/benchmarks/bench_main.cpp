#include "kmsh/charnum.hpp"
#include "kmsh/donaldson.hpp"
#include "kmsh/flow.hpp"
#include "kmsh/perturb.hpp"
#include "kmsh/tools/random_tables.hpp"

#include <benchmark/benchmark.h>

using namespace kmsh;

static void BM_InducedOps(benchmark::State& st) {
  auto g = LogPolarGrid::make(0.1, 0.9, static_cast<int>(st.range(0)), static_cast<int>(st.range(0)));
  HarmonicModel m = rank2_model(cplx(0.7, 0.4), 0.0);
  auto H = m.sample(g);
  for (auto _ : st) benchmark::DoNotOptimize(induced_ops(H, m.conn));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_InducedOps)->Arg(64)->Arg(128);

static void BM_Curvature(benchmark::State& st) {
  auto g = LogPolarGrid::make(0.1, 0.9, static_cast<int>(st.range(0)), static_cast<int>(st.range(0)));
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto o = induced_ops(perturbed_model(m, g, 0.2), m.conn);
  for (auto _ : st) benchmark::DoNotOptimize(lambda_G(pseudo_curvature(o, 1.0), KahlerWeight{0}));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Curvature)->Arg(64)->Arg(128);

static void BM_Donaldson(benchmark::State& st) {
  auto g = LogPolarGrid::make(0.1, 0.9, static_cast<int>(st.range(0)), static_cast<int>(st.range(0)));
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto H1 = m.sample(g);
  auto H2 = perturbed_model(m, g, 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(donaldson(H1, H2, m.conn, KahlerWeight{0}));
}
BENCHMARK(BM_Donaldson)->Arg(64)->Arg(128);

static void BM_FlowStep(benchmark::State& st) {
  FlowConfig cfg;
  cfg.grid = LogPolarGrid::make(0.1, 0.9, 64, 64);
  cfg.steps = 1;
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto H0 = perturbed_model(m, cfg.grid, 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(heat_flow(cfg, H0, m.conn));
}
BENCHMARK(BM_FlowStep);

static void BM_CharReport(benchmark::State& st) {
  gen::Rng rng(1);
  std::vector<ParabolicFlatData> tables;
  for (int k = 0; k < 64; ++k) tables.push_back(gen::random_flat_data(rng));
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(char_report(tables[k++ % tables.size()]));
}
BENCHMARK(BM_CharReport);

static void BM_WeightFiltration(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  QMatrix N(n, n);
  for (int i = 0; i + 1 < n; ++i) N(i, i + 1) = QComplex(1);
  for (auto _ : st) benchmark::DoNotOptimize(weight_filtration(N));
}
BENCHMARK(BM_WeightFiltration)->Arg(4)->Arg(8);

static void BM_PerturbII(benchmark::State& st) {
  gen::Rng rng(2);
  auto d = gen::random_flat_data(rng);
  auto b = gen::random_nilpotent_blocks(rng, d);
  for (auto _ : st) benchmark::DoNotOptimize(perturb_II(d, b, 10));
}
BENCHMARK(BM_PerturbII);

BENCHMARK_MAIN();
