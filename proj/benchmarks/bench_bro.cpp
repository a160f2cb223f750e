#include <benchmark/benchmark.h>

#include <vector>

#include "bro/bayes.hpp"
#include "bro/objective.hpp"
#include "bro/optimize.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"

using namespace bro;

namespace {

std::vector<double> normals(std::size_t n) {
  Stream s(1);
  std::vector<double> v(n);
  for (auto& x : v) x = s.normal();
  return v;
}

void BM_VarAlpha(benchmark::State& state) {
  const auto v = normals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(var_alpha(v, 0.95));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VarAlpha)->Range(1 << 8, 1 << 20);

void BM_CvarAlpha(benchmark::State& state) {
  const auto v = normals(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cvar_alpha(v, 0.95));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CvarAlpha)->Range(1 << 8, 1 << 20);

void BM_PosteriorSampleGamma(benchmark::State& state) {
  const auto post = posterior_update(PriorSpec::gamma(7, 11), {});
  Stream s(2);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_sample(post, static_cast<std::size_t>(state.range(0)), s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PosteriorSampleGamma)->Arg(2000)->Arg(100000);

void BM_PosteriorSampleDirichlet(benchmark::State& state) {
  const auto post = posterior_update(PriorSpec::dirichlet({4, 8, 3}, {0, 1, 2}), {});
  Stream s(3);
  for (auto _ : state) benchmark::DoNotOptimize(posterior_sample(post, 2000, s));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_PosteriorSampleDirichlet);

void BM_ObjectiveAnalytic(benchmark::State& state) {
  const auto nv = newsvendor_exponential(1, 3, 1, {0, 4});
  const BroObjective obj(nv, posterior_update(PriorSpec::gamma(101, 100), {}), 2000, 1, Stream(4));
  const std::vector<RiskSpec> specs{RiskSpec::mean(), RiskSpec::mean_variance(1), RiskSpec::value_at_risk(0.95),
                                    RiskSpec::cvar(0.95)};
  const Decision x = Decision::Constant(1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(specs, x));
}
BENCHMARK(BM_ObjectiveAnalytic);

void BM_ObjectiveMonteCarlo(benchmark::State& state) {
  const auto nv = newsvendor_exponential(1, 3, 1, {0, 4}).without_closed_forms();
  const BroObjective obj(nv, posterior_update(PriorSpec::gamma(101, 100), {}), 200,
                         static_cast<std::size_t>(state.range(0)), Stream(5));
  const Decision x = Decision::Constant(1, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(obj(RiskSpec::cvar(0.95), x));
  state.SetItemsProcessed(state.iterations() * 200 * state.range(0));
}
BENCHMARK(BM_ObjectiveMonteCarlo)->Arg(100)->Arg(1000);

void BM_SolveGridRefine(benchmark::State& state) {
  const auto nv = newsvendor_exponential(1, 3, 1, {0, 4});
  const BroObjective obj(nv, posterior_update(PriorSpec::gamma(401, 400), {}), 2000, 1, Stream(6));
  OptimizerConfig cfg;
  cfg.method = OptimizerMethod::GridRefine;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        minimize([&](const Decision& x) { return obj(RiskSpec::cvar(0.95), x); }, nv.decision_box, cfg));
  }
}
BENCHMARK(BM_SolveGridRefine)->Unit(benchmark::kMillisecond);

void BM_SolveNelderMead2D(benchmark::State& state) {
  Matrix payoff(3, 2);
  payoff << 0.6, 1.2, 0.4, -1.0, -0.5, 0.9;
  const auto pf = discrete_portfolio({0, 1, 2}, payoff, 1.0, Vector::Constant(3, 1.0 / 3.0),
                                     Box{{Interval{0, 1}, Interval{0, 1}}});
  const BroObjective obj(pf, posterior_update(PriorSpec::dirichlet({30, 30, 30}, {0, 1, 2}), {}), 2000, 1, Stream(7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimize([&](const Decision& x) { return obj(RiskSpec::mean(), x); }, pf.decision_box));
  }
}
BENCHMARK(BM_SolveNelderMead2D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
