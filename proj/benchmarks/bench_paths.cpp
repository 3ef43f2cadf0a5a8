#include <benchmark/benchmark.h>

#include <memory>

#include "rfc/criteria.hpp"
#include "rfc/measures.hpp"
#include "rfc/paths.hpp"
#include "rfc/rng.hpp"
#include "rfc/verify.hpp"

namespace {

rfc::MarketCoefficients market()
{
    rfc::MarketCoefficients c;
    c.sigma = 0.2;
    c.lambda_hat = 0.3;
    c.delta = 1.0;
    return c;
}

}  // namespace

static void BM_NormalPair(benchmark::State& state) {
  const rfc::Substream s{42, rfc::streams::kReference, 7};
  std::uint32_t block = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(rfc::normal_pair(s, block++));
}
BENCHMARK(BM_NormalPair);

static void BM_SimulatePath(benchmark::State& state) {
  const rfc::TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  const auto coeffs = std::make_shared<const rfc::CoefficientTable>(rfc::realize(market(), grid));
  rfc::PathRequest req;
  std::uint64_t i = 0;
  for (auto _ : state) {
    req.substream = {42, rfc::streams::kReference, i++};
    benchmark::DoNotOptimize(rfc::simulate_path(coeffs, req));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(52)->Arg(252)->Arg(1000);

static void BM_Doleans(benchmark::State& state) {
  const rfc::TimeGrid grid(1.0, 252);
  const auto ens = rfc::simulate_ensemble(market(), grid, 1, 1, 1);
  const auto g = rfc::GeneratorSpec::worst_case();
  for (auto _ : state)
    benchmark::DoNotOptimize(rfc::doleans(g, ens[0]));
}
BENCHMARK(BM_Doleans);

static void BM_SaddleDrift(benchmark::State& state) {
  const rfc::TimeGrid grid(1.0, 252);
  const auto c = market();
  const auto field = rfc::field_log(c, grid);
  rfc::DriftOptions opt;
  opt.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(rfc::drift_test(field, rfc::fractional_kelly(c), rfc::worst_case_generator(c),
                                             rfc::PenaltySpec::quadratic(1.0), 0.0, 1.0,
                                             static_cast<std::size_t>(state.range(0)), 42, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SaddleDrift)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
