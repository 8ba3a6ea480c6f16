#include <benchmark/benchmark.h>

#include "trajent/hilbert.hpp"
#include "trajent/master_equation.hpp"
#include "trajent/semiclassical.hpp"
#include "trajent/trajectories.hpp"
#include "trajent/wigner.hpp"

using namespace trajent;

namespace {

SystemParams params_for(int n_max) {
  return SystemParams::make(1.0, 2.0, 0.5, n_max);
}

void BM_BuildLiouvillian(benchmark::State& state) {
  auto p = params_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto liou = build_liouvillian(p, Frame::Original);
    benchmark::DoNotOptimize(liou.matrix);
  }
  state.SetComplexityN(p.dim());
}
BENCHMARK(BM_BuildLiouvillian)->Arg(12)->Arg(25)->Arg(49)->Complexity();

void BM_SteadyState(benchmark::State& state) {
  auto p = params_for(static_cast<int>(state.range(0)));
  auto liou = build_liouvillian(p, Frame::Original);
  for (auto _ : state) {
    auto rho = steady_state(liou);
    benchmark::DoNotOptimize(rho.rho);
  }
  state.SetComplexityN(p.dim());
}
BENCHMARK(BM_SteadyState)->Arg(12)->Arg(25)->Arg(49)->Complexity();

void BM_DirectTrajectory(benchmark::State& state) {
  auto p = params_for(static_cast<int>(state.range(0)));
  UnravelingConfig cfg;
  cfg.t_transient = 1.0;
  cfg.t_total = 50.0;
  for (auto _ : state) {
    auto r = simulate_direct(p, cfg, 7);
    benchmark::DoNotOptimize(r.entropy);
  }
}
BENCHMARK(BM_DirectTrajectory)->Arg(12)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_HomodyneTrajectory(benchmark::State& state) {
  auto p = params_for(static_cast<int>(state.range(0)));
  UnravelingConfig cfg;
  cfg.kind = UnravelingKind::Homodyne;
  cfg.t_transient = 1.0;
  cfg.t_total = 50.0;
  for (auto _ : state) {
    auto r = simulate_homodyne(p, cfg, 7);
    benchmark::DoNotOptimize(r.entropy);
  }
}
BENCHMARK(BM_HomodyneTrajectory)->Arg(12)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_WignerGrid(benchmark::State& state) {
  auto psi = coherent_state(Complex(1.5, 1.5), static_cast<int>(state.range(0)));
  DensityMatrix rho{psi.amps * psi.amps.adjoint(), Subspace::Cavity};
  for (auto _ : state) {
    auto grid = wigner_function(rho, -6.0, 6.0, 61, -6.0, 6.0, 61);
    benchmark::DoNotOptimize(grid.values);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WignerGrid)->Arg(25)->Arg(49)->Unit(benchmark::kMillisecond)->Complexity();

void BM_PhaseEnsembleEntropy(benchmark::State& state) {
  auto p = SystemParams::make(3.0, 1.0 / (3.0 * std::sqrt(2.0)), 0.0, 0);
  double phi = 0.0;
  for (auto _ : state) {
    auto r = analytic_phase_ensemble_entropy(p, phi);
    benchmark::DoNotOptimize(r.entropy_oracle);
    phi += 0.01;
  }
}
BENCHMARK(BM_PhaseEnsembleEntropy);

}  // namespace

BENCHMARK_MAIN();
