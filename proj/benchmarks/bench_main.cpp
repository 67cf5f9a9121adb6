#include <benchmark/benchmark.h>

#include <vector>

#include "ocecal/bounds.hpp"
#include "ocecal/calibrate.hpp"
#include "ocecal/harness.hpp"
#include "ocecal/random.hpp"
#include "ocecal/taskgen.hpp"

namespace {

std::vector<double> bernoulli_sample(std::size_t n, double p, std::uint64_t seed) {
  ocecal::Rng rng(seed);
  std::vector<double> z(n);
  for (auto& x : z) x = rng.uniform() < p ? 1.0 : 0.0;
  return z;
}

struct Splits {
  std::vector<ocecal::ExampleProfile> opt;
  std::vector<ocecal::ExampleProfile> cal;
};

const Splits& default_splits() {
  static const Splits s = [] {
    const auto data = ocecal::generate_dataset({}, 1000, 11);
    const auto parts = ocecal::split_dataset(data, {200, 800, 0}, 3);
    return Splits{ocecal::profile_examples(parts.opt.examples),
                  ocecal::profile_examples(parts.cal.examples)};
  }();
  return s;
}

void BM_WsrUcb(benchmark::State& state) {
  const auto z = bernoulli_sample(static_cast<std::size_t>(state.range(0)), 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ocecal::wsr_ucb({z, 0.2}));
}
BENCHMARK(BM_WsrUcb)->Arg(100)->Arg(800)->Arg(5000);

void BM_HoeffdingUcb(benchmark::State& state) {
  const auto z = bernoulli_sample(800, 0.3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ocecal::hoeffding_ucb({z, 0.2}));
}
BENCHMARK(BM_HoeffdingUcb);

void BM_SelectOceRcps(benchmark::State& state) {
  const auto& s = default_splits();
  const ocecal::LambdaGrid grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocecal::select_oce_rcps(s.cal, s.opt, {0.4, 0.2}, grid,
                                                     ocecal::OceCost::cvar(0.9),
                                                     ocecal::LossKind::fnr));
  }
}
BENCHMARK(BM_SelectOceRcps)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SelectOceCrc(benchmark::State& state) {
  const auto& s = default_splits();
  const ocecal::LambdaGrid grid(1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ocecal::select_oce_crc(s.cal, s.opt, {0.4, 0.2}, grid,
                                                    ocecal::OceCost::cvar(0.9),
                                                    ocecal::LossKind::fnr));
  }
}
BENCHMARK(BM_SelectOceCrc)->Unit(benchmark::kMillisecond);

void BM_GenerateDataset(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ocecal::generate_dataset({}, static_cast<std::size_t>(state.range(0)), 5));
  }
}
BENCHMARK(BM_GenerateDataset)->Arg(100)->Arg(1781)->Unit(benchmark::kMillisecond);

void BM_RunTrial(benchmark::State& state) {
  static const ocecal::TrialPool pool(ocecal::generate_dataset({}, 1781, 2024));
  const ocecal::ExperimentConfig config;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ocecal::run_trial(pool, config, 7, i++));
}
BENCHMARK(BM_RunTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
