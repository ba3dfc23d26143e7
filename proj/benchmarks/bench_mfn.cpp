#include <benchmark/benchmark.h>

#include "mfn/analysis.hpp"
#include "mfn/dynamics.hpp"
#include "mfn/presets.hpp"

#include <cmath>
#include <vector>

using namespace mfn;

static const NamedPreset& burster() {
  static const NamedPreset p = *find_preset("burster");
  return p;
}

// Steps per second of the RK4 loop with inline spike detection.
static void BM_Integrate(benchmark::State& state) {
  const auto& p = burster();
  SolverOptions o;
  o.t_end = p.cfg.tau_u;
  o.record_stride = static_cast<int>(state.range(0));
  const InputSignal in = InputSignal::constant(p.i_app);
  long long steps = 0;
  for (auto _ : state) {
    Trace tr = integrate(p.cfg, in, o);
    steps += std::llround(o.t_end / tr.dt);
    benchmark::DoNotOptimize(tr.spikes.data());
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Integrate)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_SteadyStateCurves(benchmark::State& state) {
  const auto& p = burster();
  const CurveGrid g = default_grid(p.cfg, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CurveSet cs = steady_state_curves(p.cfg, g);
    benchmark::DoNotOptimize(cs.fast.folds.data());
  }
}
BENCHMARK(BM_SteadyStateCurves)->Arg(1024)->Arg(4096)->Arg(16384);

static void BM_Classify(benchmark::State& state) {
  const auto& p = burster();
  for (auto _ : state) {
    RegimeReport r = classify(p.cfg);
    benchmark::DoNotOptimize(r.label);
  }
}
BENCHMARK(BM_Classify);

static void BM_Equilibria(benchmark::State& state) {
  const auto& p = burster();
  for (auto _ : state) {
    auto eq = equilibria(p.cfg, p.i_app);
    benchmark::DoNotOptimize(eq.data());
  }
}
BENCHMARK(BM_Equilibria);

static void BM_SegmentBursts(benchmark::State& state) {
  std::vector<double> s;
  for (int b = 0; b < state.range(0); ++b)
    for (int k = 0; k < 5; ++k) s.push_back(b * 0.2 + k * 0.004);
  for (auto _ : state) {
    auto bursts = segment_bursts(s);
    benchmark::DoNotOptimize(bursts.data());
  }
}
BENCHMARK(BM_SegmentBursts)->Arg(100)->Arg(10000);

BENCHMARK_MAIN();
