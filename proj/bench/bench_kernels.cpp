// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "mmot/experiment.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/rng.hpp"

using namespace mmot;

namespace {

DistanceTensor random_tensor(std::size_t n) {
  Rng rng(1);
  DistanceTensor t(3, n);
  for (const auto& q : combinations(n, 3)) t.set(q, rng.uniform(0.5, 1.0));
  return t;
}

std::vector<DiscreteDistribution> random_signatures(std::size_t n, std::size_t m) {
  Rng rng(2);
  std::vector<DiscreteDistribution> d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Atom> atoms;
    for (std::size_t s = 0; s < m; ++s) atoms.push_back(Atom::planar(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    d.push_back(DiscreteDistribution::uniform(atoms));
  }
  return d;
}

void BM_CheckW(benchmark::State& state) {
  const DistanceTensor t = random_tensor(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_W_tensor(t, 1.0).empirical_C);
}

void BM_CheckWSerial(benchmark::State& state) {
  const DistanceTensor t = random_tensor(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_W_tensor_serial(t, 1.0).empirical_C);
}

template <bool Parallel>
void BM_Assemble(benchmark::State& state) {
  const auto d = random_signatures(20, std::size_t(state.range(0)));
  Rng rng(3);
  const auto tuples = sample_tuples(d.size(), 3, 40, Sampling::QuadClosed, rng);
  AssemblyOptions o;
  for (auto _ : state) {
    const DistanceTensor t = Parallel ? assemble_tensor(d, tuples, o) : assemble_tensor_serial(d, tuples, o);
    benchmark::DoNotOptimize(t.sampled_count());
  }
}

}  // namespace

BENCHMARK(BM_CheckW)->Arg(20)->Arg(40);
BENCHMARK(BM_CheckWSerial)->Arg(20)->Arg(40);
BENCHMARK(BM_Assemble<true>)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble<false>)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
