#include "nveseem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "nveseem/errors.hpp"
#include "nveseem/operators.hpp"

namespace nveseem {

PulseSequence sequence_from_config(const RunConfig& config) {
  switch (config.sequence) {
    case SequenceKind::Hahn:
      return hahn_echo();
    case SequenceKind::Cpmg:
      return cpmg(config.cpmg_n, config.cpmg_phase_shift);
    case SequenceKind::Dsl:
    default: {
      std::ifstream in(config.dsl_path);
      if (!in)
        throw ConfigError("cannot open sequence file '" + config.dsl_path +
                          "'");
      std::ostringstream text;
      text << in.rdbuf();
      return parse_sequence(text.str());
    }
  }
}

ExperimentResult run_pipeline(const RunConfig& config) {
  ExperimentResult r;
  const EigenBasis basis = make_basis(config.params);
  r.calibration =
      calibrate_pulse(config.params, basis, Axis::Z, Axis::Y, config.pulse_dt);
  r.mw_freq = mw_frequency(basis);
  r.label_ambiguous = basis.ambiguous;

  const PulseSequence seq = sequence_from_config(config);
  SweepOptions opts;
  opts.pulse_dt = config.pulse_dt;
  opts.threads = config.threads;
  r.trace = run_sweep(config.params, seq, config.sweep, config.relax, basis,
                      r.calibration, opts);

  r.fit = fit_baseline(r.trace);
  const EseemTrace residual = subtract_baseline(r.trace, r.fit);
  r.spec = spectrum(residual, config.window, config.zero_pad);
  r.peaks = find_peaks(r.spec, config.min_prominence);
  if (!r.peaks.empty()) r.dominant_peak = r.peaks.front();
  r.depth = modulation_depth(r.trace, r.fit);

  r.mixing = second_order_report(config.params, basis);
  r.predicted = predicted_frequencies(basis);
  r.splitting = psi_xy_splitting(basis);
  return r;
}

OutputPaths output_paths(const RunConfig& config, const std::string& out_dir) {
  const std::string prefix =
      (std::filesystem::path(out_dir) / config.output_prefix).string();
  return OutputPaths{prefix + "_trace.csv", prefix + "_spectrum.csv",
                     prefix + "_peaks.json", prefix + "_summary.json"};
}

namespace {

std::FILE* open_for_write(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot write '" + path + "'");
  return f;
}

nlohmann::ordered_json json_number(double v) {
  // JSON has no inf; the summary spells it out instead of dropping to null.
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

nlohmann::ordered_json peaks_to_json(const std::vector<Peak>& peaks) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& pk : peaks)
    arr.push_back({{"freq_mhz", pk.freq_mhz},
                   {"amplitude", pk.amplitude},
                   {"prominence", pk.prominence}});
  return arr;
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = open_for_write(path);
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok)
    throw ConfigError("cannot write '" + path + "'");
}

}  // namespace

void write_trace_csv(const EseemTrace& trace, const std::string& path) {
  std::FILE* f = open_for_write(path);
  std::fprintf(f, "time_us,signal\n");
  for (std::size_t i = 0; i < trace.size(); ++i)
    std::fprintf(f, "%.17e,%.17e\n", trace.time_us[i], trace.signal[i]);
  if (std::fclose(f) != 0) throw ConfigError("cannot write '" + path + "'");
}

void write_spectrum_csv(const Spectrum& spec, const std::string& path) {
  std::FILE* f = open_for_write(path);
  std::fprintf(f, "freq_mhz,amplitude\n");
  for (std::size_t i = 0; i < spec.freq_mhz.size(); ++i)
    std::fprintf(f, "%.17e,%.17e\n", spec.freq_mhz[i], spec.amplitude[i]);
  if (std::fclose(f) != 0) throw ConfigError("cannot write '" + path + "'");
}

EseemTrace read_trace_csv(const std::string& path, double delay_divisor) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  if (!(delay_divisor > 0.0))
    throw ConfigError("delay divisor must be positive");
  EseemTrace trace;
  trace.sequence_name = "csv";
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "time_us,signal")
        throw ConfigError("expected header 'time_us,signal'", lineno);
      continue;
    }
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    const double t = std::strtod(s, &end);
    if (end == s || *end != ',')
      throw ConfigError("malformed trace row", lineno);
    const char* s2 = end + 1;
    const double y = std::strtod(s2, &end);
    if (end == s2 || *end != '\0')
      throw ConfigError("malformed trace row", lineno);
    trace.time_us.push_back(t);
    trace.delay_us.push_back(t / delay_divisor);
    trace.signal.push_back(y);
  }
  return trace;
}

std::string summary_json(const RunConfig& config,
                         const ExperimentResult& result) {
  using json = nlohmann::ordered_json;
  const auto& p = config.params;
  json j;
  j["schema_version"] = 1;
  j["sequence"] = sequence_spec_string(config);
  j["params"] = {{"D", p.D},
                 {"E", p.E},
                 {"P", p.P},
                 {"A_par", p.A_par},
                 {"A_perp", p.A_perp},
                 {"gamma_e", p.gamma_e},
                 {"gamma_n", p.gamma_n},
                 {"B0_mag", p.B0_mag},
                 {"B0_theta_deg", p.B0_theta / deg_per_rad_divisor},
                 {"B0_phi_deg", p.B0_phi / deg_per_rad_divisor},
                 {"geB1", p.geB1}};
  j["relaxation"] = {{"t2_us", json_number(config.relax.t2)},
                     {"stretch", config.relax.stretch}};
  j["sweep"] = {{"tau_start_us", config.sweep.tau_start},
                {"tau_stop_us", config.sweep.tau_stop},
                {"n_points", config.sweep.n_points}};
  j["seed"] = config.seed;
  j["mw_frequency_mhz"] = result.mw_freq;
  j["calibration"] = {{"t_pi_half_us", result.calibration.t_pi_half},
                      {"t_pi_us", result.calibration.t_pi},
                      {"max_transfer", result.calibration.max_transfer}};
  j["baseline_fit"] = {{"amplitude", result.fit.amplitude},
                       {"t2_us", result.fit.t2},
                       {"stretch", result.fit.stretch},
                       {"offset", result.fit.offset},
                       {"rms", result.fit.rms},
                       {"converged", result.fit.converged},
                       {"iterations", result.fit.iterations},
                       {"n_skipped", result.fit.n_skipped}};
  j["modulation_depth"] = result.depth;
  if (result.dominant_peak) {
    j["dominant_peak_mhz"] = result.dominant_peak->freq_mhz;
    j["dominant_peak_amplitude"] = result.dominant_peak->amplitude;
  } else {
    j["dominant_peak_mhz"] = nullptr;
    j["dominant_peak_amplitude"] = nullptr;
  }
  j["peaks"] = peaks_to_json(result.peaks);
  j["predicted_frequencies"] = {{"omega0_mhz", result.predicted.omega0},
                                {"omega_plus_mhz", result.predicted.omega_plus},
                                {"sum_mhz", result.predicted.sum},
                                {"diff_mhz", result.predicted.diff}};
  j["mixing"] = {{"delta", result.mixing.delta},
                 {"exact_delta", result.mixing.exact_delta},
                 {"second_order", json_number(result.mixing.second_order)},
                 {"zfs_scale", result.mixing.zfs_scale},
                 {"ratio", json_number(result.mixing.ratio)},
                 {"ratio_defined", result.mixing.ratio_defined},
                 {"epsilon", result.mixing.epsilon},
                 {"epsilon_prime", result.mixing.epsilon_prime}};
  j["psi_xy_splitting_mhz"] = result.splitting;
  j["label_ambiguous"] = result.label_ambiguous;
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const RunConfig& config,
                                const std::string& out_dir) {
  const ExperimentResult result = run_pipeline(config);
  const OutputPaths paths = output_paths(config, out_dir);
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);  // writes report failure
  }
  try {
    write_trace_csv(result.trace, paths.trace_csv);
    write_spectrum_csv(result.spec, paths.spectrum_csv);
    nlohmann::ordered_json pj;
    pj["schema_version"] = 1;
    pj["peaks"] = peaks_to_json(result.peaks);
    write_text(paths.peaks_json, pj.dump(2) + "\n");
    write_text(paths.summary_json, summary_json(config, result));
  } catch (...) {
    std::error_code ec;
    for (const auto& path : {paths.trace_csv, paths.spectrum_csv,
                             paths.peaks_json, paths.summary_json})
      std::filesystem::remove(path, ec);
    throw;
  }
  return result;
}

namespace {

double resolve_duration(const Duration& d, double tau,
                        const PulseCalibration& cal) {
  switch (d.kind) {
    case DurationKind::Tau:
      return tau;
    case DurationKind::PiHalf:
      return cal.t_pi_half;
    case DurationKind::Pi:
      return cal.t_pi;
    case DurationKind::Literal:
    default:
      return d.literal_us;
  }
}

}  // namespace

EseemTrace run_oracle_trace(const RunConfig& config) {
  const auto& p = config.params;
  const PulseSequence seq = sequence_from_config(config);
  if (seq.steps.empty() || !std::holds_alternative<Readout>(seq.steps.back()))
    throw ConfigError("sequence must end with exactly one readout");

  const EigenBasis basis = make_basis(p);
  // Same calibrated durations as the engine, so traces compare directly.
  const PulseCalibration cal =
      calibrate_pulse(p, basis, Axis::Z, Axis::Y, config.pulse_dt);
  const double omega_mw = mw_frequency(basis);

  if (std::isfinite(config.relax.t2))
    std::fprintf(stderr,
                 "warning: oracle propagation is strictly unitary; "
                 "t2_us = %g is ignored\n",
                 config.relax.t2);

  const int n = config.sweep.n_points;
  if (n < 1) throw ConfigError("sweep needs at least one point");
  const double dtau =
      n > 1 ? (config.sweep.tau_stop - config.sweep.tau_start) / (n - 1) : 0.0;
  const double dt = config.oracle_dt;
  if (!(dt > 0.0)) throw NumericError("oracle step must be positive");

  // Cost guard before any propagation.
  double total_steps = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tau = config.sweep.tau_start + i * dtau;
    for (const auto& step : seq.steps) {
      if (const auto* pl = std::get_if<Pulse>(&step)) {
        const double dur = resolve_duration(pl->duration, tau, cal);
        if (dur > 0.0)
          total_steps += static_cast<double>(
              std::max(1LL, std::llround(dur / dt)));
      }
    }
  }
  if (total_steps > 1e9)
    throw NumericError("oracle would need more than 1e9 steps; "
                       "shrink the sweep or the pulse durations");

  const Matrix9c h_static = build_static_hamiltonian(p);
  const Matrix9c sx9 = embed(spin1_matrices().x, spin1_matrices().id);
  // Exact static propagator for the delays.
  Eigen::SelfAdjointEigenSolver<Matrix9c> es(h_static);
  if (es.info() != Eigen::Success)
    throw NumericError("eigensolver failed to converge");
  const Matrix9c v_static = es.eigenvectors();
  const Vector9d w_static = es.eigenvalues();

  // Initial state and readout projector in the product basis.
  Matrix9c rho0 = Matrix9c::Zero();
  Matrix9c proj_z = Matrix9c::Zero();
  for (int nn = 0; nn < 3; ++nn) {
    const Vector9c v = basis.states.col(basis.col(Axis::Z, static_cast<Axis>(nn)));
    rho0.noalias() += (1.0 / 3.0) * v * v.adjoint();
    proj_z.noalias() += v * v.adjoint();
  }

  auto delay_propagator = [&](double tau) {
    Vector9c ph;
    for (int j = 0; j < 9; ++j)
      ph(j) = std::exp(complexd(0.0, -two_pi * w_static(j) * tau));
    return Matrix9c(v_static * ph.asDiagonal() * v_static.adjoint());
  };

  EseemTrace trace;
  trace.sequence_name = seq.name;
  trace.time_us.resize(n);
  trace.delay_us.resize(n);
  trace.signal.resize(n);

  for (int i = 0; i < n; ++i) {
    const double tau = config.sweep.tau_start + i * dtau;
    Matrix9c rho = rho0;
    double wall = 0.0, free_accum = 0.0;
    double signal = 0.0;
    for (const auto& step : seq.steps) {
      if (const auto* pl = std::get_if<Pulse>(&step)) {
        const double dur = resolve_duration(pl->duration, tau, cal);
        if (dur > 0.0) {
          const long long ns = std::max(1LL, std::llround(dur / dt));
          const double h = dur / static_cast<double>(ns);
          Matrix9c u = Matrix9c::Identity();
          for (long long k = 0; k < ns; ++k) {
            const double tm = wall + (static_cast<double>(k) + 0.5) * h;
            const double c =
                p.geB1 * std::cos(two_pi * omega_mw * tm + pl->phase);
            Eigen::SelfAdjointEigenSolver<Matrix9c> step_es(h_static +
                                                            c * sx9);
            if (step_es.info() != Eigen::Success)
              throw NumericError("eigensolver failed to converge");
            Vector9c ph;
            for (int j = 0; j < 9; ++j)
              ph(j) = std::exp(
                  complexd(0.0, -two_pi * step_es.eigenvalues()(j) * h));
            u = (step_es.eigenvectors() * ph.asDiagonal() *
                 step_es.eigenvectors().adjoint() * u)
                    .eval();
          }
          rho = u * rho * u.adjoint();
          wall += dur;
        }
      } else if (const auto* dl = std::get_if<Delay>(&step)) {
        const double dur = resolve_duration(dl->duration, tau, cal);
        if (dur < 0.0) throw NumericError("negative free-evolution time");
        const Matrix9c u = delay_propagator(dur);
        rho = u * rho * u.adjoint();
        wall += dur;
        free_accum += dur;
      } else {
        signal = (proj_z * rho).trace().real();
      }
    }
    if (signal < -1e-6 || signal > 1.0 + 1e-6)
      throw NumericError("readout population out of bounds");
    trace.time_us[i] = free_accum;
    trace.delay_us[i] = tau;
    trace.signal[i] = signal;
  }
  return trace;
}

EseemTrace run_oracle(const RunConfig& config, const std::string& out_dir) {
  const EseemTrace trace = run_oracle_trace(config);
  const std::string path =
      (std::filesystem::path(out_dir) / (config.output_prefix + "_oracle.csv"))
          .string();
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);  // writes report failure
  }
  try {
    write_trace_csv(trace, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
  return trace;
}

AnalyzeResult analyze_trace(const EseemTrace& trace, Window window,
                            int zero_pad, double min_prominence) {
  AnalyzeResult r;
  r.fit = fit_baseline(trace);
  const EseemTrace residual = subtract_baseline(trace, r.fit);
  r.spec = spectrum(residual, window, zero_pad);
  r.peaks = find_peaks(r.spec, min_prominence);
  if (!r.peaks.empty()) r.dominant_peak = r.peaks.front();
  r.depth = modulation_depth(trace, r.fit);
  return r;
}

}  // namespace nveseem
