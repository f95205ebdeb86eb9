#include "nveseem/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "nveseem/errors.hpp"

namespace nveseem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || std::isnan(out))
    throw ConfigError("bad value '" + v + "' for " + key, line);
  return out;
}

long parse_int(const std::string& v, const std::string& key, int line) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size())
    throw ConfigError("bad value '" + v + "' for " + key, line);
  return out;
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("bad value '" + v + "' for " + key + " (true/false)",
                    line);
}

// Shortest decimal string that parses back to the same double.
std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Degree string whose parse reproduces the stored radians bit for bit: the
// rounded quotient is at most a few ulps away from a preimage of the
// multiplication, when one exists.
std::string fmt_angle_deg(double rad) {
  double d = rad / deg_per_rad_divisor;
  double lo = d, hi = d;
  for (int k = 0; k < 4; ++k) {
    for (double cand : {lo, hi})
      if (cand * deg_per_rad_divisor == rad) return fmt_double(cand);
    lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  }
  return fmt_double(d);
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value,
               int line) {
  auto& p = c.params;
  if (key == "D") p.D = parse_double(value, key, line);
  else if (key == "E") p.E = parse_double(value, key, line);
  else if (key == "P") p.P = parse_double(value, key, line);
  else if (key == "A_par") p.A_par = parse_double(value, key, line);
  else if (key == "A_perp") p.A_perp = parse_double(value, key, line);
  else if (key == "gamma_e") p.gamma_e = parse_double(value, key, line);
  else if (key == "gamma_n") p.gamma_n = parse_double(value, key, line);
  else if (key == "B0_mag") p.B0_mag = parse_double(value, key, line);
  else if (key == "B0_theta_deg")
    p.B0_theta = parse_double(value, key, line) * deg_per_rad_divisor;
  else if (key == "B0_phi_deg")
    p.B0_phi = parse_double(value, key, line) * deg_per_rad_divisor;
  else if (key == "geB1") p.geB1 = parse_double(value, key, line);
  else if (key == "t2_us") c.relax.t2 = parse_double(value, key, line);
  else if (key == "stretch") c.relax.stretch = parse_double(value, key, line);
  else if (key == "tau_start_us")
    c.sweep.tau_start = parse_double(value, key, line);
  else if (key == "tau_stop_us")
    c.sweep.tau_stop = parse_double(value, key, line);
  else if (key == "n_points")
    c.sweep.n_points = static_cast<int>(parse_int(value, key, line));
  else if (key == "sequence") {
    if (value == "hahn") {
      c.sequence = SequenceKind::Hahn;
    } else if (value.rfind("cpmg:", 0) == 0) {
      c.sequence = SequenceKind::Cpmg;
      c.cpmg_n = static_cast<int>(parse_int(value.substr(5), key, line));
    } else if (value.rfind("dsl:", 0) == 0) {
      c.sequence = SequenceKind::Dsl;
      c.dsl_path = value.substr(4);
    } else {
      throw ConfigError(
          "bad value '" + value + "' for sequence (hahn|cpmg:<n>|dsl:<path>)",
          line);
    }
  } else if (key == "cpmg_phase_shift")
    c.cpmg_phase_shift = parse_bool(value, key, line);
  else if (key == "pulse_dt_us")
    c.pulse_dt = parse_double(value, key, line);
  else if (key == "oracle_dt_us")
    c.oracle_dt = parse_double(value, key, line);
  else if (key == "threads")
    c.threads = static_cast<int>(parse_int(value, key, line));
  else if (key == "window") {
    if (value == "hann") c.window = Window::Hann;
    else if (value == "none") c.window = Window::None;
    else
      throw ConfigError("bad value '" + value + "' for window (hann|none)",
                        line);
  } else if (key == "zero_pad")
    c.zero_pad = static_cast<int>(parse_int(value, key, line));
  else if (key == "min_prominence")
    c.min_prominence = parse_double(value, key, line);
  else if (key == "output_prefix")
    c.output_prefix = value;
  else if (key == "seed") {
    const long s = parse_int(value, key, line);
    if (s < 0) throw ConfigError("seed must be non-negative", line);
    c.seed = static_cast<unsigned long>(s);
  } else
    throw ConfigError("unknown key '" + key + "'", line);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("expected key = value", line);
    if (value.empty()) throw ConfigError("missing value for " + key, line);
    if (!seen.insert(key).second)
      throw ConfigError("duplicate key '" + key + "'", line);
    apply_key(c, key, value, line);
  }
  const auto problems = validate_config(c);
  if (!problems.empty()) {
    std::string msg = problems[0];
    for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
    throw ConfigError(msg);
  }
  return c;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> out;
  const auto& p = c.params;
  auto bad = [&out](const std::string& m) { out.push_back(m); };

  if (!(p.gamma_e > 0.0)) bad("gamma_e must be positive");
  if (p.gamma_n < 0.0) bad("gamma_n must be non-negative");
  if (p.B0_mag < 0.0) bad("B0_mag must be non-negative");
  if (p.B0_theta < 0.0 || p.B0_theta > pi)
    bad("B0_theta_deg must be in [0, 180]");
  if (!(p.geB1 > 0.0)) bad("geB1 must be positive");
  if (!(c.relax.t2 > 0.0)) bad("t2_us must be positive (or inf)");
  if (c.relax.stretch < 0.5 || c.relax.stretch > 3.0)
    bad("stretch must be in [0.5, 3]");
  if (c.sweep.tau_start < 0.0) bad("tau_start_us must be non-negative");
  if (!(c.sweep.tau_stop > c.sweep.tau_start))
    bad("tau_stop_us must exceed tau_start_us");
  if (c.sweep.n_points < 2) bad("n_points must be at least 2");
  if (c.sequence == SequenceKind::Cpmg && c.cpmg_n < 1)
    bad("cpmg pulse count must be at least 1");
  if (c.sequence == SequenceKind::Dsl && c.dsl_path.empty())
    bad("dsl sequence needs a file path");
  if (!(c.pulse_dt > 0.0)) bad("pulse_dt_us must be positive");
  if (c.pulse_dt * p.geB1 > 0.05)
    bad("pulse_dt_us too coarse for geB1 (needs pulse_dt*geB1 <= 0.05)");
  if (!(c.oracle_dt > 0.0)) bad("oracle_dt_us must be positive");
  if (c.threads < 0) bad("threads must be non-negative");
  if (c.zero_pad < 1) bad("zero_pad must be at least 1");
  if (c.min_prominence < 0.0 || c.min_prominence > 1.0)
    bad("min_prominence must be in [0, 1]");
  if (c.output_prefix.empty()) bad("output_prefix must not be empty");
  return out;
}

std::string sequence_spec_string(const RunConfig& c) {
  switch (c.sequence) {
    case SequenceKind::Hahn:
      return "hahn";
    case SequenceKind::Cpmg:
      return "cpmg:" + std::to_string(c.cpmg_n);
    case SequenceKind::Dsl:
    default:
      return "dsl:" + c.dsl_path;
  }
}

std::string render_config(const RunConfig& c) {
  const auto& p = c.params;
  std::ostringstream o;
  o << "# spin system (MHz, MHz/G, G, deg)\n";
  o << "D = " << fmt_double(p.D) << "\n";
  o << "E = " << fmt_double(p.E) << "\n";
  o << "P = " << fmt_double(p.P) << "\n";
  o << "A_par = " << fmt_double(p.A_par) << "\n";
  o << "A_perp = " << fmt_double(p.A_perp) << "\n";
  o << "gamma_e = " << fmt_double(p.gamma_e) << "\n";
  o << "gamma_n = " << fmt_double(p.gamma_n) << "\n";
  o << "B0_mag = " << fmt_double(p.B0_mag) << "\n";
  o << "B0_theta_deg = " << fmt_angle_deg(p.B0_theta) << "\n";
  o << "B0_phi_deg = " << fmt_angle_deg(p.B0_phi) << "\n";
  o << "geB1 = " << fmt_double(p.geB1) << "\n";
  o << "\n# relaxation\n";
  o << "t2_us = " << fmt_double(c.relax.t2) << "\n";
  o << "stretch = " << fmt_double(c.relax.stretch) << "\n";
  o << "\n# tau sweep (us)\n";
  o << "tau_start_us = " << fmt_double(c.sweep.tau_start) << "\n";
  o << "tau_stop_us = " << fmt_double(c.sweep.tau_stop) << "\n";
  o << "n_points = " << c.sweep.n_points << "\n";
  o << "\n# sequence\n";
  o << "sequence = " << sequence_spec_string(c) << "\n";
  o << "cpmg_phase_shift = " << (c.cpmg_phase_shift ? "true" : "false")
    << "\n";
  o << "\n# numerics\n";
  o << "pulse_dt_us = " << fmt_double(c.pulse_dt) << "\n";
  o << "oracle_dt_us = " << fmt_double(c.oracle_dt) << "\n";
  o << "threads = " << c.threads << "\n";
  o << "\n# analysis\n";
  o << "window = " << (c.window == Window::Hann ? "hann" : "none") << "\n";
  o << "zero_pad = " << c.zero_pad << "\n";
  o << "min_prominence = " << fmt_double(c.min_prominence) << "\n";
  o << "\n# output\n";
  o << "output_prefix = " << c.output_prefix << "\n";
  o << "seed = " << c.seed << "\n";
  return o.str();
}

}  // namespace nveseem
