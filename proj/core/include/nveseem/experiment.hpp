#pragma once

#include <optional>
#include <string>

#include "nveseem/analysis.hpp"
#include "nveseem/config.hpp"
#include "nveseem/perturbation.hpp"
#include "nveseem/propagation.hpp"
#include "nveseem/sequence.hpp"

namespace nveseem {

// Everything produced by one run: the sweep itself plus the derived analysis
// and the perturbation-theory cross-checks.
struct ExperimentResult {
  EseemTrace trace;
  BaselineFit fit;
  Spectrum spec;
  std::vector<Peak> peaks;

  double mw_freq = 0.0;  // drive frequency used, MHz
  double depth = 0.0;    // modulation depth
  std::optional<Peak> dominant_peak;

  PulseCalibration calibration;
  MixingReport mixing;
  FrequencyPrediction predicted;
  double splitting = 0.0;  // psi_x / psi_y manifold separation, MHz
  bool label_ambiguous = false;
};

// Build the sequence a config asks for (throws ConfigError for a bad DSL
// file or cpmg_n < 1).
PulseSequence sequence_from_config(const RunConfig& config);

// Run the full pipeline in memory: basis, calibration, sweep, fit, spectrum,
// peaks, perturbation report.
ExperimentResult run_pipeline(const RunConfig& config);

struct OutputPaths {
  std::string trace_csv;
  std::string spectrum_csv;
  std::string peaks_json;
  std::string summary_json;
};
OutputPaths output_paths(const RunConfig& config, const std::string& out_dir);

// run_pipeline plus the four output files.  If anything throws after files
// have started to appear, the partial outputs are removed before the
// exception propagates.
ExperimentResult run_experiment(const RunConfig& config, const std::string& out_dir = ".");

// Reference integrator: the same sweep evaluated by brute-force stepping of
// the full lab-frame Hamiltonian (static part diagonalized once per run;
// pulses stepped at oracle_dt with a fresh eigensolve per step).  Strictly
// unitary -- a finite t2 is ignored with a warning on stderr.  Throws
// NumericError if the total step count would exceed 1e9.
EseemTrace run_oracle_trace(const RunConfig& config);

// run_oracle_trace plus the trace CSV (same format as run_experiment).
EseemTrace run_oracle(const RunConfig& config, const std::string& out_dir = ".");

// CSV I/O.  Traces are "time_us,signal", spectra "freq_mhz,amplitude", both
// with full-precision scientific values.  read_trace_csv reconstructs
// delay_us as time/delay_divisor (2 for a Hahn echo, 2n for CPMG-n).
void write_trace_csv(const EseemTrace& trace, const std::string& path);
EseemTrace read_trace_csv(const std::string& path, double delay_divisor = 2.0);
void write_spectrum_csv(const Spectrum& spec, const std::string& path);

// Analysis of an existing trace (the "analyze" verb): fit, residual
// spectrum, peaks, depth.
struct AnalyzeResult {
  BaselineFit fit;
  Spectrum spec;
  std::vector<Peak> peaks;
  double depth = 0.0;
  std::optional<Peak> dominant_peak;
};
AnalyzeResult analyze_trace(const EseemTrace& trace, Window window = Window::Hann,
                            int zero_pad = 4, double min_prominence = 0.05);

// The run-summary JSON document (schema_version 1) as a string.
std::string summary_json(const RunConfig& config, const ExperimentResult& result);

}  // namespace nveseem
