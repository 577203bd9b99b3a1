#include <benchmark/benchmark.h>

#include "mdkit/md_solver.hpp"
#include "mdkit/presets.hpp"
#include "mdkit/wkb_solver.hpp"

using namespace mdkit;

namespace {

SpinorField bump(const GridSpec& g) {
  return gaussian_spinor(g, {0.0, 0.0, 0.0}, 1.0 / 16, Spinor{1.0, 0.0, 0.0, 0.0}, [](const Vec3&) { return 0.0; }, 0.01);
}

void BM_SpinorFft(benchmark::State& st) {
  const GridSpec g = make_cube(-0.5, 0.5, static_cast<int>(st.range(0)));
  Fft fft(g);
  SpinorField psi = bump(g);
  for (auto _ : st) {
    fft.forward(psi.data, 4);
    fft.inverse(psi.data, 4);
    benchmark::DoNotOptimize(psi.data.data());
  }
}
BENCHMARK(BM_SpinorFft)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Step1Tables(benchmark::State& st) {
  const GridSpec g = make_cube(-0.5, 0.5, static_cast<int>(st.range(0)));
  const WavenumberLadder ladder(g);
  const DiracSymbolTables tables(ladder, 1.0 / 128, 0.01, 1.0);
  SpinorField psi = bump(g);
  for (auto _ : st) {
    tables.apply_all(psi.data);
    benchmark::DoNotOptimize(psi.data.data());
  }
}
BENCHMARK(BM_Step1Tables)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MdAdvance(benchmark::State& st) {
  SimConfig cfg;
  cfg.epsilon = 0.01;
  cfg.grid = make_cube(-0.5, 0.5, static_cast<int>(st.range(0)));
  MdSolver solver(cfg);
  MdState s = solver.initial_state(bump(cfg.grid), PotentialInit::zero, PotentialInit::zero);
  for (auto _ : st) solver.advance(s);
}
BENCHMARK(BM_MdAdvance)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_WkbAdvance(benchmark::State& st) {
  Config u;
  u.set("preset.name", "steady_state");
  u.set("solver.kind", "wkb");
  u.set("grid.n", std::to_string(st.range(0)));
  const Experiment e = make_experiment(resolve_config(u));
  WkbSolver solver(e.sim.grid, e.sim.external, e.wkb);
  const WkbInitial init = wkb_initial(e, solver.fft());
  WkbState s = solver.initial_state(init.phi_plus, init.phi_minus, init.u_plus, init.u_minus);
  for (auto _ : st) solver.advance(s, e.sim.dt);
}
BENCHMARK(BM_WkbAdvance)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
