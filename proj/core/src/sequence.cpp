#include "nveseem/sequence.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nveseem/errors.hpp"

namespace nveseem {

PulseSequence hahn_echo() {
  PulseSequence s;
  s.name = "hahn";
  s.steps = {Pulse{{DurationKind::PiHalf, 0.0}, 0.0},
             Delay{{DurationKind::Tau, 0.0}},
             Pulse{{DurationKind::Pi, 0.0}, 0.0},
             Delay{{DurationKind::Tau, 0.0}},
             Pulse{{DurationKind::PiHalf, 0.0}, 0.0},
             Readout{}};
  return s;
}

PulseSequence cpmg(int n_pi, bool phase_shifted_pi) {
  if (n_pi < 1) throw ConfigError("cpmg needs at least one pi pulse");
  PulseSequence s;
  s.name = "cpmg:" + std::to_string(n_pi);
  const double pi_phase = phase_shifted_pi ? pi / 2.0 : 0.0;
  s.steps.push_back(Pulse{{DurationKind::PiHalf, 0.0}, 0.0});
  for (int k = 0; k < n_pi; ++k) {
    s.steps.push_back(Delay{{DurationKind::Tau, 0.0}});
    s.steps.push_back(Pulse{{DurationKind::Pi, 0.0}, pi_phase});
    s.steps.push_back(Delay{{DurationKind::Tau, 0.0}});
  }
  s.steps.push_back(Pulse{{DurationKind::PiHalf, 0.0}, 0.0});
  s.steps.push_back(Readout{});
  return s;
}

namespace {

struct Token {
  std::string text;
  int line, col;
};

// Statements separated by ';' or newline; '#' starts a comment.
std::vector<std::vector<Token>> tokenize_statements(const std::string& text) {
  std::vector<std::vector<Token>> stmts;
  std::vector<Token> cur;
  Token tok;
  int line = 1, col = 0;
  bool comment = false;

  auto flush_tok = [&] {
    if (!tok.text.empty()) {
      cur.push_back(tok);
      tok.text.clear();
    }
  };
  auto flush_stmt = [&] {
    flush_tok();
    if (!cur.empty()) {
      stmts.push_back(cur);
      cur.clear();
    }
  };

  for (char ch : text) {
    ++col;
    if (ch == '\n') {
      flush_stmt();
      comment = false;
      ++line;
      col = 0;
      continue;
    }
    if (comment) continue;
    if (ch == '#') {
      flush_tok();
      comment = true;
    } else if (ch == ';') {
      flush_stmt();
    } else if (ch == ' ' || ch == '\t' || ch == '\r') {
      flush_tok();
    } else {
      if (tok.text.empty()) {
        tok.line = line;
        tok.col = col;
      }
      tok.text += ch;
    }
  }
  flush_stmt();
  return stmts;
}

double parse_number(const Token& t, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.text.size())
    throw SequenceParseError(std::string("bad ") + what + " '" + t.text + "'",
                             t.line, t.col);
  return v;
}

void expect_args(const std::vector<Token>& stmt, std::size_t n) {
  if (stmt.size() == n + 1) return;
  const Token& t = stmt[0];
  throw SequenceParseError("'" + t.text + "' takes " + std::to_string(n) +
                               (n == 1 ? " argument" : " arguments"),
                           t.line, t.col);
}

}  // namespace

PulseSequence parse_sequence(const std::string& text) {
  PulseSequence seq;
  seq.name = "dsl";
  bool have_read = false;
  int end_line = 1;

  for (const auto& stmt : tokenize_statements(text)) {
    const Token& head = stmt[0];
    end_line = head.line;
    if (have_read)
      throw SequenceParseError("statement after readout", head.line, head.col);

    if (head.text == "p90" || head.text == "p180") {
      expect_args(stmt, 1);
      const double phase = parse_number(stmt[1], "phase") * deg_per_rad_divisor;
      const DurationKind kind =
          head.text == "p90" ? DurationKind::PiHalf : DurationKind::Pi;
      seq.steps.push_back(Pulse{{kind, 0.0}, phase});
    } else if (head.text == "p") {
      expect_args(stmt, 2);
      const double dur_ns = parse_number(stmt[1], "duration");
      if (dur_ns < 0.0)
        throw SequenceParseError("negative pulse duration", stmt[1].line,
                                 stmt[1].col);
      const double phase = parse_number(stmt[2], "phase") * deg_per_rad_divisor;
      seq.steps.push_back(Pulse{{DurationKind::Literal, dur_ns * 1e-3}, phase});
    } else if (head.text == "d") {
      expect_args(stmt, 1);
      if (stmt[1].text == "tau") {
        seq.steps.push_back(Delay{{DurationKind::Tau, 0.0}});
      } else {
        const double dur_ns = parse_number(stmt[1], "duration");
        if (dur_ns < 0.0)
          throw SequenceParseError("negative delay duration", stmt[1].line,
                                   stmt[1].col);
        seq.steps.push_back(Delay{{DurationKind::Literal, dur_ns * 1e-3}});
      }
    } else if (head.text == "read") {
      expect_args(stmt, 0);
      seq.steps.push_back(Readout{});
      have_read = true;
    } else {
      throw SequenceParseError("unknown directive '" + head.text + "'",
                               head.line, head.col);
    }
  }
  if (!have_read)
    throw SequenceParseError("missing readout at end of sequence", end_line, 1);
  return seq;
}

namespace {

double resolve(const Duration& d, double tau, const PulseCalibration& cal) {
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

void validate_sequence(const PulseSequence& seq, int n_points) {
  int n_read = 0;
  bool tau_ref = false;
  for (const auto& step : seq.steps) {
    if (std::holds_alternative<Readout>(step)) {
      ++n_read;
    } else if (const auto* pl = std::get_if<Pulse>(&step)) {
      if (pl->duration.kind == DurationKind::Tau) tau_ref = true;
    } else if (const auto* dl = std::get_if<Delay>(&step)) {
      if (dl->duration.kind == DurationKind::Tau) tau_ref = true;
    }
  }
  if (n_read != 1 || !std::holds_alternative<Readout>(seq.steps.back()))
    throw ConfigError("sequence must end with exactly one readout");
  if (!tau_ref && n_points > 1)
    throw ConfigError("sequence never references tau; nothing to sweep");
}

}  // namespace

EseemTrace run_sweep(const SpinSystemParams& p, const PulseSequence& seq,
                     const SweepSpec& sweep, const RelaxationModel& relax,
                     const EigenBasis& basis, const PulseCalibration& cal,
                     const SweepOptions& opts) {
  if (sweep.n_points < 1) throw ConfigError("sweep needs at least one point");
  if (seq.steps.empty()) throw ConfigError("empty sequence");
  validate_sequence(seq, sweep.n_points);
  if (sweep.n_points > 1 && !(sweep.tau_stop > sweep.tau_start))
    throw ConfigError("sweep axis must be strictly increasing");

  const double omega_mw = mw_frequency(basis);
  const int n = sweep.n_points;
  const double dtau =
      n > 1 ? (sweep.tau_stop - sweep.tau_start) / (n - 1) : 0.0;

  EseemTrace trace;
  trace.sequence_name = seq.name;
  trace.time_us.resize(n);
  trace.delay_us.resize(n);
  trace.signal.resize(n);

  std::atomic<bool> warned{false};
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto eval_point = [&](int i) {
    const double tau = sweep.tau_start + i * dtau;
    Matrix9c rho = initial_state(basis);
    double wall = 0.0;        // absolute time, fixes each pulse's carrier phase
    double free_accum = 0.0;  // free evolution only: the T2 clock
    double signal = 0.0;
    for (const auto& step : seq.steps) {
      if (const auto* pl = std::get_if<Pulse>(&step)) {
        const double dur = resolve(pl->duration, tau, cal);
        propagate_pulse(rho, dur, omega_mw, pl->phase, p, basis, opts.pulse_dt,
                        wall);
        wall += dur;
      } else if (const auto* dl = std::get_if<Delay>(&step)) {
        const double dur = resolve(dl->duration, tau, cal);
        free_evolve(rho, dur, basis, relax, free_accum);
        free_accum += dur;
        wall += dur;
      } else {
        signal = readout_population(rho, basis);
      }
    }
    if (signal < -1e-6 || signal > 1.0 + 1e-6)
      throw NumericError("readout population out of bounds");
    Eigen::SelfAdjointEigenSolver<Matrix9c> es(rho, Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < -1e-6 &&
        !warned.exchange(true)) {
      std::fprintf(stderr,
                   "warning: density matrix lost positivity "
                   "(min eigenvalue %.3g)\n",
                   es.eigenvalues().minCoeff());
    }
    trace.time_us[i] = free_accum;
    trace.delay_us[i] = tau;
    trace.signal[i] = signal;
  };

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        eval_point(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = opts.threads > 0
                      ? opts.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return trace;
}

EseemTrace run_sweep(const SpinSystemParams& p, const PulseSequence& seq,
                     const SweepSpec& sweep, const RelaxationModel& relax,
                     const SweepOptions& opts) {
  const EigenBasis basis = make_basis(p);
  const PulseCalibration cal =
      calibrate_pulse(p, basis, Axis::Z, Axis::Y, opts.pulse_dt);
  return run_sweep(p, seq, sweep, relax, basis, cal, opts);
}

}  // namespace nveseem
