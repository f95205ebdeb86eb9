// Microbenchmarks for the hot paths: eigensolve, pulse integration, free
// evolution, one full echo point, pulse calibration, and the residual
// transform.  Run with --benchmark_min_time=... as needed.

#include <cmath>
#include <limits>

#include <benchmark/benchmark.h>

#include <nveseem/analysis.hpp>
#include <nveseem/operators.hpp>
#include <nveseem/propagation.hpp>
#include <nveseem/sequence.hpp>

using namespace nveseem;

namespace {

const SpinSystemParams& params() {
  static const SpinSystemParams p;
  return p;
}

const EigenBasis& basis() {
  static const EigenBasis b = make_basis(params());
  return b;
}

const PulseCalibration& calibration() {
  static const PulseCalibration c = calibrate_pulse(params(), basis());
  return c;
}

}  // namespace

static void BM_diagonalize(benchmark::State& state) {
  const Matrix9c h = build_static_hamiltonian(params());
  for (auto _ : state) {
    EigenBasis b = diagonalize(h);
    benchmark::DoNotOptimize(b.freq(0));
  }
}
BENCHMARK(BM_diagonalize);

static void BM_make_basis(benchmark::State& state) {
  for (auto _ : state) {
    EigenBasis b = make_basis(params());
    benchmark::DoNotOptimize(b.label_col[0]);
  }
}
BENCHMARK(BM_make_basis);

static void BM_pulse_propagator_pi(benchmark::State& state) {
  const double omega = mw_frequency(basis());
  const double dur = calibration().t_pi;
  for (auto _ : state) {
    Matrix9c u = pulse_propagator(dur, omega, 0.0, 0.0, params(), basis());
    benchmark::DoNotOptimize(u(0, 0));
  }
}
BENCHMARK(BM_pulse_propagator_pi);

static void BM_free_evolve(benchmark::State& state) {
  RelaxationModel r;
  r.t2 = 3.0;
  Matrix9c rho = initial_state(basis());
  rho(0, 5) = complexd(0.1, 0.05);
  rho(5, 0) = std::conj(rho(0, 5));
  double acc = 0.0;
  for (auto _ : state) {
    free_evolve(rho, 0.1, basis(), r, acc);
    acc += 0.1;
    benchmark::DoNotOptimize(rho(0, 5));
  }
}
BENCHMARK(BM_free_evolve);

static void BM_hahn_point(benchmark::State& state) {
  SweepSpec sw;
  sw.tau_start = sw.tau_stop = 0.3;
  sw.n_points = 1;
  RelaxationModel r;
  r.t2 = 3.0;
  SweepOptions opts;
  opts.threads = 1;
  const PulseSequence seq = hahn_echo();
  for (auto _ : state) {
    EseemTrace t =
        run_sweep(params(), seq, sw, r, basis(), calibration(), opts);
    benchmark::DoNotOptimize(t.signal[0]);
  }
}
BENCHMARK(BM_hahn_point);

static void BM_calibrate(benchmark::State& state) {
  for (auto _ : state) {
    PulseCalibration c = calibrate_pulse(params(), basis());
    benchmark::DoNotOptimize(c.t_pi);
  }
}
BENCHMARK(BM_calibrate);

static void BM_spectrum(benchmark::State& state) {
  EseemTrace res;
  for (int i = 0; i < 500; ++i) {
    const double tau = 0.02 + 0.01 * i;
    res.delay_us.push_back(tau);
    res.time_us.push_back(2.0 * tau);
    res.signal.push_back(0.01 * std::cos(two_pi * 5.08 * tau) +
                         0.005 * std::cos(two_pi * 9.9 * tau));
  }
  for (auto _ : state) {
    Spectrum s = spectrum(res, Window::Hann, 4);
    benchmark::DoNotOptimize(s.amplitude[10]);
  }
}
BENCHMARK(BM_spectrum);

BENCHMARK_MAIN();
