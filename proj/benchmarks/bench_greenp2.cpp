#include <benchmark/benchmark.h>

#include <cmath>

#include "greenp2/invariants.hpp"
#include "greenp2/multiplicity.hpp"
#include "greenp2/potentials.hpp"
#include "greenp2/sampling.hpp"

using namespace greenp2;

namespace {

ProjMap power_map(int d) {
  return ProjMap::validate(
      {HomogPoly3::monomial(d, 0, 0), HomogPoly3::monomial(0, d, 0), HomogPoly3::monomial(0, 0, d)});
}

ProjMap random_map(int d, std::uint64_t seed) {
  Rng rng(seed);
  std::array<HomogPoly3, 3> f;
  for (auto& p : f) {
    std::vector<Complex> c(HomogPoly3::size_for(d));
    for (auto& x : c) x = rng.complex_normal();
    p = HomogPoly3(d, c);
  }
  return ProjMap::validate(f);
}

void BM_Compose(benchmark::State& state) {
  const ProjMap f = random_map(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(compose(f, f));
}
BENCHMARK(BM_Compose)->Arg(2)->Arg(3)->Arg(4);

void BM_Green(benchmark::State& state) {
  const ProjMap f = random_map(static_cast<int>(state.range(0)), 2);
  const GreenEvaluator g(f);
  Rng rng(3);
  const ProjPoint x = ProjPoint::from(rng.fs_point());
  for (auto _ : state) benchmark::DoNotOptimize(g(x, 1e-8));
}
BENCHMARK(BM_Green)->Arg(2)->Arg(3);

void BM_Preimages(benchmark::State& state) {
  const ProjMap f = random_map(static_cast<int>(state.range(0)), 4);
  Rng rng(5);
  const ProjPoint q = ProjPoint::from(rng.fs_point());
  for (auto _ : state) benchmark::DoNotOptimize(preimages(f, q));
}
BENCHMARK(BM_Preimages)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MultiplicitySeries(benchmark::State& state) {
  const ProjMap f = ProjMap::validate({HomogPoly3::monomial(1, 0, 1, 2.0) + HomogPoly3::monomial(0, 2, 0),
                                       HomogPoly3::monomial(2, 0, 0), HomogPoly3::monomial(0, 0, 2)});
  const ProjPoint p = ProjPoint::from({0.0, 0.0, 1.0});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mu_order(f, p, n));
}
BENCHMARK(BM_MultiplicitySeries)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_LocalDegree(benchmark::State& state) {
  const ProjMap f = power_map(2);
  const ProjPoint p = ProjPoint::from({0.0, 0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(e_local(f, p, 1));
}
BENCHMARK(BM_LocalDegree)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const ProjMap f = gen_table1(table1_rows()[static_cast<std::size_t>(state.range(0))], 2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(classify(exceptional_sets(f)));
}
BENCHMARK(BM_Classify)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);

void BM_Equidist(benchmark::State& state) {
  const ProjMap f = power_map(2);
  const HomogPoly3 phi = HomogPoly3::linear({1.0, 1.0, 2.0});
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(equidist_distance(f, phi, 8, 10000, 11, threads));
}
BENCHMARK(BM_Equidist)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Lelong(benchmark::State& state) {
  const ChartPotential u = [](Complex z, Complex w) { return std::log(std::abs(z * z + w * w * w)); };
  for (auto _ : state) benchmark::DoNotOptimize(lelong_estimate(u, {0.0, 0.0}));
}
BENCHMARK(BM_Lelong);

void BM_VolumeDecay(benchmark::State& state) {
  const ProjMap f = power_map(2);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(volume_decay(f, {2, {0.0, 0.0}, 0.1}, n, 10000, 3));
}
BENCHMARK(BM_VolumeDecay)->DenseRange(0, 4, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
