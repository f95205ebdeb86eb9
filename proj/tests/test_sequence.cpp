#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include <nveseem/errors.hpp>
#include <nveseem/sequence.hpp>

using namespace nveseem;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

RelaxationModel no_decay() {
  RelaxationModel r;
  r.t2 = kInf;
  return r;
}

// Structural fingerprint of a sequence, ignoring its name.
std::string shape(const PulseSequence& s) {
  std::string out;
  char buf[64];
  for (const auto& step : s.steps) {
    if (const auto* p = std::get_if<Pulse>(&step)) {
      const char* k = p->duration.kind == DurationKind::Tau      ? "tau"
                      : p->duration.kind == DurationKind::PiHalf ? "pi2"
                      : p->duration.kind == DurationKind::Pi     ? "pi"
                                                                 : "lit";
      std::snprintf(buf, sizeof buf, "P(%s%.6g,ph%.6g);", k,
                    p->duration.kind == DurationKind::Literal
                        ? p->duration.literal_us
                        : 0.0,
                    p->phase);
      out += buf;
    } else if (const auto* d = std::get_if<Delay>(&step)) {
      const char* k = d->duration.kind == DurationKind::Tau ? "tau" : "lit";
      std::snprintf(buf, sizeof buf, "D(%s%.6g);", k,
                    d->duration.kind == DurationKind::Literal
                        ? d->duration.literal_us
                        : 0.0);
      out += buf;
    } else {
      out += "R;";
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("canonical echo structure") {
  const PulseSequence h = hahn_echo();
  CHECK(h.name == "hahn");
  REQUIRE(h.steps.size() == 6);
  CHECK(shape(h) == "P(pi20,ph0);D(tau0);P(pi0,ph0);D(tau0);P(pi20,ph0);R;");
}

TEST_CASE("multi-pulse train structure") {
  SUBCASE("n = 1 reduces to the two-delay echo") {
    CHECK(shape(cpmg(1)) == shape(hahn_echo()));
    CHECK(cpmg(1).name == "cpmg:1");
  }

  SUBCASE("n = 10 has ten refocusing pulses and twenty delays") {
    const PulseSequence s = cpmg(10);
    CHECK(s.name == "cpmg:10");
    int n_pi = 0, n_delay = 0, n_read = 0, n_pi2 = 0;
    for (const auto& step : s.steps) {
      if (const auto* p = std::get_if<Pulse>(&step)) {
        if (p->duration.kind == DurationKind::Pi) ++n_pi;
        if (p->duration.kind == DurationKind::PiHalf) ++n_pi2;
      } else if (std::holds_alternative<Delay>(step)) {
        ++n_delay;
      } else {
        ++n_read;
      }
    }
    CHECK(n_pi == 10);
    CHECK(n_pi2 == 2);
    CHECK(n_delay == 20);
    CHECK(n_read == 1);
    CHECK(std::holds_alternative<Readout>(s.steps.back()));
  }

  SUBCASE("n = 0 is rejected") {
    CHECK_THROWS_AS(cpmg(0), ConfigError);
  }

  SUBCASE("phase-shifted variant puts pi pulses on the shifted carrier") {
    const PulseSequence s = cpmg(3, true);
    for (const auto& step : s.steps) {
      if (const auto* p = std::get_if<Pulse>(&step)) {
        if (p->duration.kind == DurationKind::Pi)
          CHECK(p->phase == doctest::Approx(pi / 2));
        else
          CHECK(p->phase == 0.0);
      }
    }
  }
}

TEST_CASE("sequence text parsing") {
  SUBCASE("newline-separated echo matches the built-in") {
    const PulseSequence s =
        parse_sequence("p90 0\nd tau\np180 0\nd tau\np90 0\nread\n");
    CHECK(s.name == "dsl");
    CHECK(shape(s) == shape(hahn_echo()));
  }

  SUBCASE("semicolons and comments") {
    const PulseSequence s = parse_sequence(
        "# refocused pair\np90 0; d tau  # first half\np180 90; d tau; p90 "
        "0\nread");
    REQUIRE(s.steps.size() == 6);
    const auto& refocus = std::get<Pulse>(s.steps[2]);
    CHECK(refocus.phase == doctest::Approx(pi / 2));
  }

  SUBCASE("explicit durations are nanoseconds") {
    const PulseSequence s = parse_sequence("p 100 90; d 250; read");
    const auto& p = std::get<Pulse>(s.steps[0]);
    CHECK(p.duration.kind == DurationKind::Literal);
    CHECK(p.duration.literal_us == doctest::Approx(0.1));
    CHECK(p.phase == doctest::Approx(pi / 2));
    const auto& d = std::get<Delay>(s.steps[1]);
    CHECK(d.duration.kind == DurationKind::Literal);
    CHECK(d.duration.literal_us == doctest::Approx(0.25));
  }

  SUBCASE("minimal valid program") {
    const PulseSequence s = parse_sequence("p90 0; read");
    CHECK(s.steps.size() == 2);
  }

  SUBCASE("unknown directive with position") {
    try {
      parse_sequence("p90 0\nfoo 1\nread");
      FAIL("expected a parse error");
    } catch (const SequenceParseError& e) {
      CHECK(std::string(e.what()).find("unknown directive") !=
            std::string::npos);
      CHECK(e.line == 2);
      CHECK(e.col == 1);
    }
  }

  SUBCASE("bad number") {
    try {
      parse_sequence("p90 north\nread");
      FAIL("expected a parse error");
    } catch (const SequenceParseError& e) {
      CHECK(std::string(e.what()).find("bad phase") != std::string::npos);
      CHECK(e.line == 1);
      CHECK(e.col == 5);
    }
  }

  SUBCASE("negative durations") {
    CHECK_THROWS_AS(parse_sequence("p -5 0; read"), SequenceParseError);
    CHECK_THROWS_AS(parse_sequence("d -1; read"), SequenceParseError);
  }

  SUBCASE("wrong argument count") {
    CHECK_THROWS_AS(parse_sequence("p90\nread"), SequenceParseError);
    CHECK_THROWS_AS(parse_sequence("p90 0 0\nread"), SequenceParseError);
  }

  SUBCASE("missing readout") {
    try {
      parse_sequence("p90 0\nd tau");
      FAIL("expected a parse error");
    } catch (const SequenceParseError& e) {
      CHECK(std::string(e.what()).find("missing readout") != std::string::npos);
    }
  }

  SUBCASE("statement after readout") {
    try {
      parse_sequence("read\np90 0");
      FAIL("expected a parse error");
    } catch (const SequenceParseError& e) {
      CHECK(std::string(e.what()).find("after readout") != std::string::npos);
      CHECK(e.line == 2);
    }
  }
}

TEST_CASE("sweep validation") {
  const SpinSystemParams p;
  SweepSpec sw;
  sw.tau_start = 0.1;
  sw.tau_stop = 0.2;
  sw.n_points = 2;

  SUBCASE("sequence without a readout at the end") {
    PulseSequence s;
    s.steps = {Pulse{{DurationKind::PiHalf, 0.0}, 0.0}};
    CHECK_THROWS_AS(run_sweep(p, s, sw, no_decay()), ConfigError);
    s.steps = {Readout{}, Pulse{{DurationKind::PiHalf, 0.0}, 0.0}};
    CHECK_THROWS_AS(run_sweep(p, s, sw, no_decay()), ConfigError);
  }

  SUBCASE("sweeping a sequence that never uses tau") {
    PulseSequence s;
    s.steps = {Pulse{{DurationKind::PiHalf, 0.0}, 0.0},
               Delay{{DurationKind::Literal, 0.1}}, Readout{}};
    CHECK_THROWS_AS(run_sweep(p, s, sw, no_decay()), ConfigError);
    // a single point is fine: nothing is swept
    SweepSpec one;
    one.tau_start = one.tau_stop = 0.1;
    one.n_points = 1;
    const EseemTrace t = run_sweep(p, s, one, no_decay());
    CHECK(t.size() == 1);
  }

  SUBCASE("non-increasing axis") {
    SweepSpec bad;
    bad.tau_start = 0.3;
    bad.tau_stop = 0.1;
    bad.n_points = 4;
    CHECK_THROWS_AS(run_sweep(p, hahn_echo(), bad, no_decay()), ConfigError);
  }
}

TEST_CASE("echo amplitude at zero delay") {
  const SpinSystemParams p;
  SweepSpec sw;
  sw.tau_start = sw.tau_stop = 0.0;
  sw.n_points = 1;
  const EseemTrace t = run_sweep(p, hahn_echo(), sw, no_decay());
  REQUIRE(t.size() == 1);
  CHECK(t.time_us[0] == 0.0);
  // survival after three back-to-back calibrated pulses
  CHECK(std::abs(t.signal[0] - 0.9764684) < 5e-5);
}

TEST_CASE("trace axes and bounds") {
  const SpinSystemParams p;
  SweepSpec sw;
  sw.tau_start = 0.02;
  sw.tau_stop = 3.0;
  sw.n_points = 16;
  RelaxationModel r;
  r.t2 = 3.0;
  const EseemTrace t = run_sweep(p, hahn_echo(), sw, r);
  REQUIRE(t.size() == 16);
  CHECK(t.sequence_name == "hahn");
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Hahn: total evolution time is twice the swept delay
    CHECK(t.time_us[i] == doctest::Approx(2.0 * t.delay_us[i]).epsilon(1e-12));
    CHECK(t.signal[i] >= 0.0);
    CHECK(t.signal[i] <= 1.0);
  }
  CHECK(t.signal[0] > 0.9);
  // uniform grid endpoints
  CHECK(t.delay_us.front() == doctest::Approx(0.02));
  CHECK(t.delay_us.back() == doctest::Approx(3.0));
}

TEST_CASE("sweep is deterministic and thread-count independent") {
  const SpinSystemParams p;
  SweepSpec sw;
  sw.tau_start = 0.1;
  sw.tau_stop = 0.45;
  sw.n_points = 8;
  RelaxationModel r;
  r.t2 = 3.0;

  SweepOptions opt1;
  opt1.threads = 1;
  SweepOptions opt4;
  opt4.threads = 4;

  const EseemTrace a = run_sweep(p, hahn_echo(), sw, r, opt1);
  const EseemTrace b = run_sweep(p, hahn_echo(), sw, r, opt4);
  const EseemTrace c = run_sweep(p, hahn_echo(), sw, r, opt4);

  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.signal[i] == b.signal[i]);  // bitwise
    CHECK(b.signal[i] == c.signal[i]);
  }
}

TEST_CASE("single-refocus train reproduces the echo trace") {
  const SpinSystemParams p;
  SweepSpec sw;
  sw.tau_start = 0.05;
  sw.tau_stop = 0.5;
  sw.n_points = 6;
  RelaxationModel r;
  r.t2 = 3.0;

  const EseemTrace h = run_sweep(p, hahn_echo(), sw, r);
  const EseemTrace c = run_sweep(p, cpmg(1), sw, r);
  REQUIRE(h.size() == c.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK(std::abs(h.signal[i] - c.signal[i]) < 1e-12);
    CHECK(h.time_us[i] == doctest::Approx(c.time_us[i]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
