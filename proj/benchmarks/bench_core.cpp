// Microbenchmarks for the hot paths: the degradedness feasibility program,
// the discrete sum-rate objective, and one Monte-Carlo decoding trial.

#include <benchmark/benchmark.h>

#include "mto/capacity.hpp"
#include "mto/checks.hpp"
#include "mto/pmf.hpp"
#include "mto/regimes.hpp"
#include "mto/rng.hpp"
#include "mto/simulate.hpp"

namespace {

void bm_degraded_lp(benchmark::State& state) {
  mto::SplitMix64 gen(7);
  const mto::DiscreteChannel ch = mto::random_deterministic_channel(gen, 3, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mto::degraded_lp(ch));
  }
}
BENCHMARK(bm_degraded_lp);

void bm_discrete_tin_sum_rate(benchmark::State& state) {
  const mto::DiscreteChannel ch = mto::toy_xor_channel();
  std::vector<mto::Pmf> input;
  for (std::size_t i = 0; i < ch.k; ++i)
    input.push_back(mto::Pmf::uniform(ch.x_alphabets[i].size()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mto::discrete_tin_sum_rate(ch, input));
  }
}
BENCHMARK(bm_discrete_tin_sum_rate);

void bm_tin_trial(benchmark::State& state) {
  const mto::DiscreteChannel ch = mto::toy_xor_channel();
  mto::TrialConfig cfg;
  cfg.rates = {0.9, 0.9, 0.9};
  cfg.trials = 1;
  for (auto _ : state) {
    cfg.seed = static_cast<std::uint64_t>(state.iterations());
    benchmark::DoNotOptimize(
        mto::run_tin_trial(ch, cfg, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bm_tin_trial)->Arg(10)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
