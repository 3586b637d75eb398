#include <benchmark/benchmark.h>

#include "jumpdrift/basis.hpp"
#include "jumpdrift/estimator.hpp"
#include "jumpdrift/metrics.hpp"
#include "jumpdrift/sde_sim.hpp"
#include "jumpdrift/selection.hpp"

using namespace jumpdrift;

namespace {

const PathBundle& model1_bundle() {
  static const PathBundle bundle = simulate_bundle(builtin_model(1), TimeGrid{5.0, 200}, 400, 1);
  return bundle;
}

void BM_SimulateBundle(benchmark::State& state) {
  const auto model = builtin_model(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_bundle(model, TimeGrid{5.0, 200}, 400, ++seed));
  state.SetItemsProcessed(state.iterations() * 400 * 200);
}
BENCHMARK(BM_SimulateBundle)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_EmpiricalMoments(benchmark::State& state) {
  const auto basis = Basis::trigonometric(-3.0, 3.0);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(empirical_moments(model1_bundle(), basis, m));
}
BENCHMARK(BM_EmpiricalMoments)->Arg(6)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SelectModel(benchmark::State& state) {
  const auto basis = Basis::trigonometric(-3.0, 3.0);
  SelectionConfig cfg;
  cfg.mode = AdmissibleMode::all;
  cfg.gate = GateMode::singular_only;
  for (auto _ : state) benchmark::DoNotOptimize(select_model(model1_bundle(), basis, cfg));
}
BENCHMARK(BM_SelectModel)->Unit(benchmark::kMillisecond);

void BM_HermiteEval(benchmark::State& state) {
  const auto basis = Basis::hermite();
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(m);
  double x = -4.0;
  for (auto _ : state) {
    basis.eval_all(x, out);
    benchmark::DoNotOptimize(out.data());
    x = x > 4.0 ? -4.0 : x + 1e-3;
  }
}
BENCHMARK(BM_HermiteEval)->Arg(6)->Arg(50);

}  // namespace
BENCHMARK_MAIN();
