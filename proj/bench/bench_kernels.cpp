// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "contest/eos.hpp"
#include "contest/kernels.hpp"
#include "contest/response.hpp"

namespace {

using contest::Execution;

void grid_oracle(benchmark::State& state, Execution execution) {
  const double cost = 1.3;
  const double alpha = 1.6;
  const double opposition = 0.8;
  const double step = 1e-6 / cost;
  for (auto _ : state) {
    auto r = contest::response::grid_oracle(cost, alpha, opposition, step, 1.0, execution);
    benchmark::DoNotOptimize(r.utility);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(1.0 / (cost * step)));
}

void enumerate(benchmark::State& state, Execution execution) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> costs;
  for (std::size_t i = 0; i < n; ++i) costs.push_back(1.0 + 0.03 * static_cast<double>(i));
  const contest::ContestSpec spec(costs, 1.15);
  contest::eos::EnumerationOptions opt;
  opt.execution = execution;
  opt.verify.execution = Execution::serial;
  for (auto _ : state) {
    auto eqs = contest::eos::enumerate_equilibria(spec, opt);
    benchmark::DoNotOptimize(eqs.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(grid_oracle, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_oracle, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(enumerate, serial, Execution::serial)
    ->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(enumerate, parallel, Execution::parallel)
    ->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
