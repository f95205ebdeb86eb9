#pragma once

#include "nveseem/eigenbasis.hpp"
#include "nveseem/params.hpp"

namespace nveseem {

// MW drive term in the product basis: geB1 * (Sx (x) 1) * cos(2 pi omega t).
Matrix9c drive_hamiltonian(const SpinSystemParams& p, double omega_mw, double t_us);

// Electron in the psi_z manifold, nuclear spin unpolarized: 1/3 on each
// psi_z-labeled eigenstate, no coherences.  Density matrices here are always
// expressed in the eigenbasis.
Matrix9c initial_state(const EigenBasis& basis);

// Free evolution for tau: eigenphase rotation of every coherence plus
// phenomenological decay of electron-manifold-crossing coherences.
// `tau_accum` is the free-evolution time already accumulated before this
// segment; the decay applied is
//   exp(-((tau_accum + tau)/T2)^p + (tau_accum/T2)^p),
// which telescopes over segments to exp(-(t_free_total/T2)^p).
void free_evolve(Matrix9c& rho, double tau, const EigenBasis& basis,
                 const RelaxationModel& relax, double tau_accum = 0.0);

// Net propagator of one MW pulse in the eigenbasis (frame transform in and
// out included).  The pulse is integrated in the interaction frame of the
// full diagonalized Hamiltonian with piecewise-constant midpoint sampling of
// the cosine drive (no rotating-wave truncation); each step propagator is an
// exact 9x9 exponential.  `t_start` is the absolute time of the pulse start,
// which fixes the carrier phase cos(2 pi omega t + phase).
Matrix9c pulse_propagator(double duration, double omega_mw, double phase,
                          double t_start, const SpinSystemParams& p,
                          const EigenBasis& basis, double dt = 1e-4);

void propagate_pulse(Matrix9c& rho, double duration, double omega_mw,
                     double phase, const SpinSystemParams& p,
                     const EigenBasis& basis, double dt = 1e-4,
                     double t_start = 0.0);

// Total population of the psi_z-labeled manifold (the optically read state).
double readout_population(const Matrix9c& rho, const EigenBasis& basis);

struct PulseCalibration {
  double t_pi_half;     // us
  double t_pi;          // us
  double max_transfer;  // best population transfer reached in the scan
};

// Scan the resonant drive from the `from` manifold and measure population
// arriving in the `to` manifold: t_pi is the (parabolically refined) first
// transfer maximum, t_pi_half the first crossing of half that maximum.
// Throws NumericError if no maximum exists within 0-1 us.
PulseCalibration calibrate_pulse(const SpinSystemParams& p,
                                 const EigenBasis& basis,
                                 Axis from = Axis::Z, Axis to = Axis::Y,
                                 double dt = 1e-4);

}  // namespace nveseem
