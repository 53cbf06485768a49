// Microbenchmarks for the hot paths: score-network evaluation, the DSM
// training step, the ScoreMix optimizer, and the evaluation metrics.

#include <benchmark/benchmark.h>

#include "smx/augment.hpp"
#include "smx/dataset.hpp"
#include "smx/field.hpp"
#include "smx/metrics.hpp"
#include "smx/scorenet.hpp"

namespace {

using namespace smx;

ScoreNetwork bench_net() {
  GaussianMixture g = preset_gauss1(0.5, 2);
  Dataset ds = sample_gmm(g, 256, 1);
  return make_scorenet(2, make_schedule(ds), {128, 128, 128}, 3, 0.25);
}

void BM_EvalScore(benchmark::State& state) {
  const ScoreNetwork net = bench_net();
  const SampleVec x{0.4, -0.7};
  for (auto _ : state)
    benchmark::DoNotOptimize(eval_score(net, x, net.schedule.scale_count()));
}
BENCHMARK(BM_EvalScore);

void BM_DsmLossStep(benchmark::State& state) {
  const ScoreNetwork net = bench_net();
  Rng rng(5);
  std::vector<SampleVec> batch(32, SampleVec(2));
  for (SampleVec& s : batch)
    for (double& v : s) v = 0.5 * rng.normal();
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dsm_loss(net, batch, ++seed));
}
BENCHMARK(BM_DsmLossStep);

void BM_ScoreMixAnalytic(benchmark::State& state) {
  const GaussianMixture ring = preset_ring8();
  const AnalyticScoreField field(ring);
  MixConfig mix;
  std::uint64_t k = 0;
  for (auto _ : state) {
    Rng rng(++k);
    const SampleVec x1 = ring.draw(rng), x2 = ring.draw(rng);
    mix.seed = k;
    benchmark::DoNotOptimize(scoremix(x1, x2, field, mix));
  }
}
BENCHMARK(BM_ScoreMixAnalytic);

void BM_FrechetGaussian(benchmark::State& state) {
  const GaussianMixture ring = preset_ring8();
  Rng rng(9);
  std::vector<SampleVec> a, b;
  for (int i = 0; i < 4096; ++i) {
    a.push_back(ring.draw(rng));
    b.push_back(ring.draw(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(frechet_gaussian(a, b));
}
BENCHMARK(BM_FrechetGaussian);

void BM_ModeCoverage(benchmark::State& state) {
  const GaussianMixture ring = preset_ring8();
  Rng rng(9);
  std::vector<SampleVec> a;
  for (int i = 0; i < 4096; ++i) a.push_back(ring.draw(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(mode_coverage(a, ring, 3.0));
}
BENCHMARK(BM_ModeCoverage);

}  // namespace

BENCHMARK_MAIN();
