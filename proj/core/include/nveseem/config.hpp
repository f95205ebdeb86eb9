#pragma once

#include <string>
#include <vector>

#include "nveseem/analysis.hpp"
#include "nveseem/params.hpp"

namespace nveseem {

enum class SequenceKind { Hahn, Cpmg, Dsl };

// Full description of one simulation run.  Parsed from a plain "key = value"
// text file; every key is optional and falls back to the default below.
struct RunConfig {
  SpinSystemParams params;
  RelaxationModel relax;
  SweepSpec sweep;

  SequenceKind sequence = SequenceKind::Hahn;
  int cpmg_n = 10;                // pi-pulse count for sequence = cpmg
  bool cpmg_phase_shift = false;  // pi pulses 90 deg from the pi/2 pulses
  std::string dsl_path;           // sequence file for sequence = dsl

  double pulse_dt = 1e-4;   // pulse integrator step, us
  double oracle_dt = 1e-5;  // reference-integrator step, us
  int threads = 0;          // 0 = hardware concurrency

  Window window = Window::Hann;
  int zero_pad = 4;
  double min_prominence = 0.05;

  std::string output_prefix = "eseem";
  unsigned long seed = 0;  // reserved; recorded in the run summary

  bool operator==(const RunConfig&) const = default;
};

// Parse a config file's text.  Throws ConfigError (with a 1-based line
// number) on unknown keys, duplicate keys, malformed values, or values that
// fail validation.  Angles are given in degrees in the file and stored in
// radians; "inf" is accepted for t2_us.
RunConfig parse_config(const std::string& text);

// Canonical text form.  parse_config(render_config(c)) == c exactly: angle
// fields are printed as the degree value whose conversion back to radians
// reproduces the stored bits.
std::string render_config(const RunConfig& c);

// Non-throwing validation; returns one message per problem, empty if valid.
std::vector<std::string> validate_config(const RunConfig& c);

// Human-readable one-liner for the configured sequence ("hahn", "cpmg:10",
// or the DSL file path).
std::string sequence_spec_string(const RunConfig& c);

}  // namespace nveseem
