#include <benchmark/benchmark.h>

#include <numbers>

#include "nlsync/ode_sim.hpp"
#include "nlsync/pde.hpp"
#include "nlsync/sync.hpp"

namespace {

using namespace nlsync;

const State3 kStart{{0.349, 0.0, -0.3}};

void BM_Rk4Step(benchmark::State& state) {
  const VectorField field = newton_leipnik_field(Params{});
  State3 u = kStart;
  for (auto _ : state) {
    u = rk4_step(field, u, 1e-3);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_Rk4Step);

void BM_LyapunovSpectrum(benchmark::State& state) {
  const Params p;
  LyapunovOptions opts;
  opts.transient = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(kStart, p, 1e-3, 110.0, opts));
}
BENCHMARK(BM_LyapunovSpectrum)->Unit(benchmark::kMillisecond);

void BM_ImexStep(benchmark::State& state) {
  const Params p;
  const Grid1D g{10.0, static_cast<std::size_t>(state.range(0))};
  constexpr double pi = std::numbers::pi;
  Field3 f = make_field(g, {CosineProfile{0.349, pi / 2}, CosineProfile{0.0, pi / 2},
                            CosineProfile{-0.3, pi / 2}});
  ImexStepper stepper(g, {0.1, 0.1, 0.1}, StepperConfig{1e-3});
  const Reaction r = pointwise([&](const State3& u) { return reaction_rhs(u, p); });
  for (auto _ : state) {
    stepper.step(f, r);
    benchmark::DoNotOptimize(f.c[0].data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImexStep)->Arg(201)->Arg(1001);

void BM_MasterSlaveOneTimeUnit(benchmark::State& state) {
  const Params p;
  const Grid1D g{10.0, 201};
  constexpr double pi = std::numbers::pi;
  const Field3 m = make_field(g, {CosineProfile{0.349, pi / 2}, CosineProfile{0.0, pi / 2},
                                  CosineProfile{-0.3, pi / 2}});
  const Field3 s = make_field(g, {CosineProfile{0.7, 3 * pi / 5}, CosineProfile{0.15, 2 * pi / 5},
                                  CosineProfile{0.7, 7 * pi / 10}});
  SyncOptions opts;
  opts.snapshot_count = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_master_slave(m, s, p, StepperConfig{}, 1.0, true, opts));
}
BENCHMARK(BM_MasterSlaveOneTimeUnit)->Unit(benchmark::kMillisecond);

}  // namespace
