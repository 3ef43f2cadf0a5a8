#include <benchmark/benchmark.h>

#include <vector>

#include "rfc/dualpde.hpp"
#include "rfc/oracle/checks.hpp"
#include "rfc/oracle/solver.hpp"

using namespace rfc::oracle;

namespace {

TreeMarket trinomial(std::size_t periods)
{
    return TreeMarket(std::vector<Period>(periods, Period{{0.12, 0.01, -0.1}, {0.4, 0.35, 0.25}}));
}

}  // namespace

static void BM_SolveEntropicLog(benchmark::State& state) {
  const auto m = trinomial(static_cast<std::size_t>(state.range(0)));
  const auto fam = MeasureFamily::entropic(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_primal(m, fam, Utility::log(), 1.0));
}
BENCHMARK(BM_SolveEntropicLog)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_SolvePower(benchmark::State& state) {
  const auto m = trinomial(static_cast<std::size_t>(state.range(0)));
  const auto fam = MeasureFamily::entropic(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_primal(m, fam, Utility::power(2.0), 1.0));
}
BENCHMARK(BM_SolvePower)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

static void BM_LogDual(benchmark::State& state) {
  const auto m = trinomial(3);
  const auto fam = MeasureFamily::entropic(1.0);
  DualOptions opt;
  opt.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_dual(m, fam, Utility::log(), opt));
}
BENCHMARK(BM_LogDual)->Unit(benchmark::kMillisecond);

static void BM_CheckDpp(benchmark::State& state) {
  const auto m = trinomial(static_cast<std::size_t>(state.range(0)));
  const auto fam = MeasureFamily::entropic(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(check_dpp(m, fam));
}
BENCHMARK(BM_CheckDpp)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_HjbResidual(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> t(n + 1), A(n + 1), lam(n + 1, 0.3);
  for (std::size_t k = 0; k <= n; ++k) {
    t[k] = double(k) / double(n);
    A[k] = -0.0225 * t[k];
  }
  const auto V = rfc::sample_log_dual(0.1, 10.0, 101, t, A);
  const auto g = rfc::PenaltyIntegrand::quadratic(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(rfc::hjb_residual(V, g, lam, 1));
}
BENCHMARK(BM_HjbResidual)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
