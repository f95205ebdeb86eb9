#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nveseem/errors.hpp"
#include "nveseem/experiment.hpp"

namespace {

using namespace nveseem;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Window parse_window(const std::string& name) {
  if (name == "hann") return Window::Hann;
  if (name == "none") return Window::None;
  throw ConfigError("bad window '" + name + "' (hann|none)");
}

void print_run_report(const RunConfig& cfg, const ExperimentResult& res,
                      const OutputPaths& paths) {
  std::printf("sequence:          %s\n", sequence_spec_string(cfg).c_str());
  std::printf("mw frequency:      %.6f MHz\n", res.mw_freq);
  std::printf("pi/2, pi pulses:   %.5f, %.5f us\n", res.calibration.t_pi_half,
              res.calibration.t_pi);
  std::printf("baseline T2:       %.4f us (stretch %.3f)\n", res.fit.t2,
              res.fit.stretch);
  std::printf("modulation depth:  %.5f\n", res.depth);
  if (res.dominant_peak)
    std::printf("dominant peak:     %.4f MHz\n", res.dominant_peak->freq_mhz);
  else
    std::printf("dominant peak:     none\n");
  std::printf("predicted omega0:  %.4f MHz, omega_plus %.4f MHz\n",
              res.predicted.omega0, res.predicted.omega_plus);
  std::printf("wrote: %s %s %s %s\n", paths.trace_csv.c_str(),
              paths.spectrum_csv.c_str(), paths.peaks_json.c_str(),
              paths.summary_json.c_str());
}

int dispatch(const CLI::App& app, const std::string& config_path,
             const std::string& trace_path, const std::string& out_dir,
             double delay_div, const std::string& window_name, int zero_pad,
             double min_prominence) {
  if (app.got_subcommand("run")) {
    const RunConfig cfg = parse_config(read_file(config_path));
    const ExperimentResult res = run_experiment(cfg, out_dir);
    print_run_report(cfg, res, output_paths(cfg, out_dir));
  } else if (app.got_subcommand("oracle")) {
    const RunConfig cfg = parse_config(read_file(config_path));
    const EseemTrace trace = run_oracle(cfg, out_dir);
    std::printf("oracle trace: %zu points, %s_oracle.csv\n", trace.size(),
                (out_dir + "/" + cfg.output_prefix).c_str());
  } else if (app.got_subcommand("validate")) {
    parse_config(read_file(config_path));
    std::printf("ok\n");
  } else if (app.got_subcommand("defaults")) {
    std::fputs(render_config(RunConfig{}).c_str(), stdout);
  } else if (app.got_subcommand("analyze")) {
    const EseemTrace trace = read_trace_csv(trace_path, delay_div);
    const AnalyzeResult r =
        analyze_trace(trace, parse_window(window_name), zero_pad,
                      min_prominence);
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["n_points"] = trace.size();
    j["baseline_fit"] = {{"amplitude", r.fit.amplitude},
                         {"t2_us", r.fit.t2},
                         {"stretch", r.fit.stretch},
                         {"offset", r.fit.offset},
                         {"rms", r.fit.rms},
                         {"converged", r.fit.converged},
                         {"iterations", r.fit.iterations},
                         {"n_skipped", r.fit.n_skipped}};
    j["modulation_depth"] = r.depth;
    if (r.dominant_peak)
      j["dominant_peak_mhz"] = r.dominant_peak->freq_mhz;
    else
      j["dominant_peak_mhz"] = nullptr;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& pk : r.peaks)
      arr.push_back({{"freq_mhz", pk.freq_mhz},
                     {"amplitude", pk.amplitude},
                     {"prominence", pk.prominence}});
    j["peaks"] = arr;
    std::printf("%s\n", j.dump(2).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"electron-nuclear spin-echo simulator for a driven S=1/I=1 "
               "defect in a transverse magnetic field"};
  app.require_subcommand(1);

  std::string config_path, trace_path;
  std::string out_dir = ".";
  std::string window_name = "hann";
  double delay_div = 2.0;
  int zero_pad = 4;
  double min_prominence = 0.05;

  CLI::App* run = app.add_subcommand("run", "simulate a sweep and analyze it");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--out-dir", out_dir, "output directory (default .)");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "brute-force lab-frame reference for the same config");
  oracle->add_option("config", config_path, "config file")->required();
  oracle->add_option("-o,--out-dir", out_dir, "output directory (default .)");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", config_path, "config file")->required();

  app.add_subcommand("defaults", "print the canonical default config");

  CLI::App* analyze =
      app.add_subcommand("analyze", "fit/spectrum/peaks for an existing trace");
  analyze->add_option("trace", trace_path, "trace CSV (time_us,signal)")
      ->required();
  analyze->add_option("--delay-div", delay_div,
                      "delay = time/this (2 for a two-delay echo, 2n for "
                      "n-pulse trains); default 2");
  analyze->add_option("--window", window_name, "hann|none (default hann)");
  analyze->add_option("--zero-pad", zero_pad, "zero-pad factor (default 4)");
  analyze->add_option("--min-prominence", min_prominence,
                      "peak prominence floor, fraction of max (default 0.05)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return dispatch(app, config_path, trace_path, out_dir, delay_div,
                    window_name, zero_pad, min_prominence);
  } catch (const ConfigError& e) {
    if (e.line > 0)
      std::fprintf(stderr, "error: %s (line %d)\n", e.what(), e.line);
    else
      std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
}
