#include "nveseem/propagation.hpp"

#include <cmath>
#include <vector>

#include "nveseem/errors.hpp"
#include "nveseem/operators.hpp"

namespace nveseem {

Matrix9c drive_hamiltonian(const SpinSystemParams& p, double omega_mw,
                           double t_us) {
  const auto& s = spin1_matrices();
  return (p.geB1 * std::cos(two_pi * omega_mw * t_us)) * embed(s.x, s.id);
}

Matrix9c initial_state(const EigenBasis& basis) {
  Matrix9c rho = Matrix9c::Zero();
  for (int n = 0; n < 3; ++n)
    rho(basis.col(Axis::Z, static_cast<Axis>(n)),
        basis.col(Axis::Z, static_cast<Axis>(n))) = 1.0 / 3.0;
  return rho;
}

void free_evolve(Matrix9c& rho, double tau, const EigenBasis& basis,
                 const RelaxationModel& relax, double tau_accum) {
  if (tau < 0.0) throw NumericError("negative free-evolution time");
  Vector9c u;
  for (int j = 0; j < 9; ++j)
    u(j) = std::exp(complexd(0.0, -two_pi * basis.freq(j) * tau));
  // Incremental decay of electron-manifold-crossing coherences; the
  // increments telescope to exp(-(t_free_total/T2)^p) over a sequence.
  const double g =
      std::exp(std::pow(tau_accum / relax.t2, relax.stretch) -
               std::pow((tau_accum + tau) / relax.t2, relax.stretch));
  for (int j = 0; j < 9; ++j) {
    for (int k = j + 1; k < 9; ++k) {
      complexd v = rho(j, k) * u(j) * std::conj(u(k));
      if (basis.col_electron[j] != basis.col_electron[k]) v *= g;
      rho(j, k) = v;
      rho(k, j) = std::conj(v);
    }
  }
}

namespace {

// One pulse-integrator step in the interaction frame of the static
// eigenfrequencies: the sampled drive c_k * sx exponentiates exactly through
// the spectral factors of sx.  Chaining steps telescopes the frame phases
// into a single diagonal per step (matrix K below), leaving one 9x9
// multiplication per step.
struct PulseStepper {
  const EigenBasis& basis;
  double h;          // step, us
  double amp;        // geB1
  double omega, phase, t0;

  double drive(long long k) const {
    const double tm = (static_cast<double>(k) + 0.5) * h;
    return amp * std::cos(two_pi * omega * (t0 + tm) + phase);
  }

  // E_k = exp(-i 2 pi c_k h sigma) on the sx eigenvalues.
  Vector9c step_diag(long long k) const {
    const double a = two_pi * drive(k) * h;
    Vector9c e;
    for (int m = 0; m < 9; ++m)
      e(m) = std::exp(complexd(0.0, -a * basis.sx_vals(m)));
    return e;
  }
};

void check_pulse_dt(double dt, const SpinSystemParams& p) {
  if (!(dt > 0.0)) throw NumericError("pulse step must be positive");
  if (dt * p.geB1 > 0.05)
    throw NumericError("pulse step too coarse for the drive amplitude");
}

}  // namespace

Matrix9c pulse_propagator(double duration, double omega_mw, double phase,
                          double t_start, const SpinSystemParams& p,
                          const EigenBasis& basis, double dt) {
  if (duration <= 0.0) return Matrix9c::Identity();
  check_pulse_dt(dt, p);
  const long long n = std::max(1LL, std::llround(duration / dt));
  const double h = duration / static_cast<double>(n);
  const PulseStepper st{basis, h, p.geB1, omega_mw, phase, t_start};

  const Matrix9c& W = basis.sx_vecs;
  // Inter-step frame advance, rotated into the sx eigenbasis.
  Vector9c q;
  for (int j = 0; j < 9; ++j)
    q(j) = std::exp(complexd(0.0, -two_pi * basis.freq(j) * h));
  const Matrix9c K = W.adjoint() * q.asDiagonal() * W;

  Matrix9c M = st.step_diag(0).asDiagonal();
  for (long long k = 1; k < n; ++k) {
    M = (K * M).eval();
    M = st.step_diag(k).asDiagonal() * M;
  }

  // Frame factors at both ends collapse to half a step of static phase.
  Vector9c dh;
  for (int j = 0; j < 9; ++j)
    dh(j) = std::exp(complexd(0.0, -pi * basis.freq(j) * h));
  return dh.asDiagonal() * (W * M * W.adjoint()) * dh.asDiagonal();
}

void propagate_pulse(Matrix9c& rho, double duration, double omega_mw,
                     double phase, const SpinSystemParams& p,
                     const EigenBasis& basis, double dt, double t_start) {
  const Matrix9c U =
      pulse_propagator(duration, omega_mw, phase, t_start, p, basis, dt);
  rho = U * rho * U.adjoint();
}

double readout_population(const Matrix9c& rho, const EigenBasis& basis) {
  double pop = 0.0;
  for (int n = 0; n < 3; ++n)
    pop += rho(basis.col(Axis::Z, static_cast<Axis>(n)),
               basis.col(Axis::Z, static_cast<Axis>(n)))
               .real();
  return pop;
}

PulseCalibration calibrate_pulse(const SpinSystemParams& p,
                                 const EigenBasis& basis, Axis from, Axis to,
                                 double dt) {
  check_pulse_dt(dt, p);
  double f_from = 0.0, f_to = 0.0;
  std::array<int, 3> from_cols{}, to_cols{};
  for (int n = 0; n < 3; ++n) {
    from_cols[n] = basis.col(from, static_cast<Axis>(n));
    to_cols[n] = basis.col(to, static_cast<Axis>(n));
    f_from += basis.freq(from_cols[n]);
    f_to += basis.freq(to_cols[n]);
  }
  const double omega = (f_to - f_from) / 3.0;

  const long long n = std::llround(1.0 / dt);  // scan up to 1 us
  const PulseStepper st{basis, dt, p.geB1, omega, 0.0, 0.0};
  const Matrix9c& W = basis.sx_vecs;

  // Accumulate the interaction-frame propagator step by step; the diagonal
  // frame factors drop out of the populations sampled below.
  Vector9c q;
  for (int j = 0; j < 9; ++j)
    q(j) = std::exp(complexd(0.0, -two_pi * basis.freq(j) * dt));
  const Matrix9c K = W.adjoint() * q.asDiagonal() * W;

  // Sample the transferred population after every step; stop once it has
  // clearly come back down, which leaves the first major maximum as the
  // trajectory's global one.
  Matrix9c M = Matrix9c::Identity();  // in the sx eigenbasis
  std::vector<double> traj;
  traj.reserve(4096);
  double best = -1.0;
  bool broke = false;
  for (long long k = 0; k < n; ++k) {
    if (k > 0) M = (K * M).eval();
    M = st.step_diag(k).asDiagonal() * M;
    const Matrix9c cur = W * M * W.adjoint();
    double s = 0.0;
    for (int c : to_cols)
      for (int b : from_cols) s += std::norm(cur(c, b));
    s /= 3.0;
    traj.push_back(s);
    best = std::max(best, s);
    if (s < best - 0.25) {
      broke = true;
      break;
    }
  }

  std::size_t im = 0;
  for (std::size_t k = 1; k < traj.size(); ++k)
    if (traj[k] > traj[im]) im = k;
  const double pmax = traj[im];
  if ((!broke && im + 1 == traj.size()) || pmax < 1e-3)
    throw NumericError("no transfer maximum found within 0-1 us");

  double t_pi = static_cast<double>(im + 1) * dt;
  if (im > 0 && im + 1 < traj.size()) {
    const double a = traj[im - 1], b = traj[im], c = traj[im + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) t_pi += 0.5 * (a - c) / denom * dt;
  }

  std::size_t ih = 0;
  while (ih < traj.size() && traj[ih] < pmax / 2.0) ++ih;
  const double t_half = static_cast<double>(ih + 1) * dt;
  return PulseCalibration{t_half, t_pi, pmax};
}

}  // namespace nveseem
