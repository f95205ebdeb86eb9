#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nveseem/propagation.hpp"

namespace nveseem {

// Durations stay symbolic until a sweep point substitutes them: the sweep
// variable tau, the calibrated pi/2 and pi durations, or a literal.
enum class DurationKind { Tau, PiHalf, Pi, Literal };
struct Duration {
  DurationKind kind = DurationKind::Tau;
  double literal_us = 0.0;  // used when kind == Literal
};

struct Pulse {
  Duration duration;
  double phase = 0.0;  // rad, carrier phase offset
};
struct Delay {
  Duration duration;
};
struct Readout {};

using SequenceStep = std::variant<Pulse, Delay, Readout>;

struct PulseSequence {
  std::string name;
  std::vector<SequenceStep> steps;
};

// pi/2 - tau - pi - tau - pi/2 - readout, all pulses phase 0.
PulseSequence hahn_echo();

// pi/2 - [tau - pi - tau]^n - pi/2 - readout.  phase_shifted_pi puts the pi
// pulses on the 90-degree-shifted carrier (the standard phase-alternation
// variant); default keeps every pulse at phase 0.
PulseSequence cpmg(int n_pi, bool phase_shifted_pi = false);

// Line-oriented sequence DSL; statements separated by ';' or newline,
// comments from '#' to end of line:
//   p90 <phase_deg>            calibrated pi/2 pulse
//   p180 <phase_deg>           calibrated pi pulse
//   p <duration_ns> <phase_deg>  explicit pulse
//   d <tau|duration_ns>        free evolution
//   read                       readout (required, must be last)
// Errors carry 1-based line and column.
PulseSequence parse_sequence(const std::string& text);

// Echo signal vs total free-evolution time.  time_us is the sum of all
// delays executed for the point (2*tau for a Hahn echo, 2*n*tau for a
// CPMG-n); delay_us is the swept tau itself, which is the axis the spectral
// analysis transforms against.
struct EseemTrace {
  std::vector<double> time_us;
  std::vector<double> delay_us;
  std::vector<double> signal;
  std::string sequence_name;

  std::size_t size() const { return signal.size(); }
};

struct SweepOptions {
  double pulse_dt = 1e-4;  // pulse integrator step, us
  int threads = 0;         // 0 = hardware concurrency
};

// Evaluate the sequence over the tau grid.  Points are independent and run
// concurrently; results are assembled in grid order, so traces are
// deterministic for fixed inputs regardless of thread count.
EseemTrace run_sweep(const SpinSystemParams& p, const PulseSequence& seq,
                     const SweepSpec& sweep, const RelaxationModel& relax,
                     const SweepOptions& opts = {});

// Variant reusing a prepared basis and calibration (must belong to `p`).
EseemTrace run_sweep(const SpinSystemParams& p, const PulseSequence& seq,
                     const SweepSpec& sweep, const RelaxationModel& relax,
                     const EigenBasis& basis, const PulseCalibration& cal,
                     const SweepOptions& opts = {});

}  // namespace nveseem
