#pragma once

#include "nveseem/types.hpp"

namespace nveseem {

// Static spin system: S=1 electron coupled to the I=1 14N nucleus.
// Defaults are the working point of the experiment this code models:
// 75 G transverse field, strain-split ground state, 14N quadrupole.
struct SpinSystemParams {
  double D = 2870.0;         // axial zero-field splitting, MHz
  double E = 2.75;           // transverse (strain) zero-field splitting, MHz
  double P = -5.04;          // 14N nuclear quadrupole coupling, MHz
  double A_par = 2.3;        // axial hyperfine coupling, MHz
  double A_perp = 2.1;       // transverse (flip-flop) hyperfine coupling, MHz
  double gamma_e = 2.8025;   // electron gyromagnetic ratio, MHz/G
  double gamma_n = 3.077e-4; // 14N gyromagnetic ratio, MHz/G
  double B0_mag = 75.0;      // static field magnitude, G
  double B0_theta = pi / 2;  // polar angle from the defect z axis, rad
  double B0_phi = 0.0;       // azimuth in the defect xy plane, rad
  double geB1 = 5.0;         // MW drive amplitude gamma_e*B1, MHz

  bool operator==(const SpinSystemParams&) const = default;
};

// Phenomenological decay of electron coherences, applied during free
// evolution only: coherences between different electron manifolds pick up
// exp(-(t_free/T2)^p) as a function of accumulated free-evolution time.
struct RelaxationModel {
  double t2 = 3.0;      // T2 of electron-manifold-crossing coherences, us
                        // (infinity disables decay)
  double stretch = 1.0; // stretching exponent p, in [0.5, 3]

  bool operator==(const RelaxationModel&) const = default;
};

// Uniform grid of the swept interpulse delay tau.
struct SweepSpec {
  double tau_start = 0.02;  // us
  double tau_stop = 5.0;    // us
  int n_points = 500;

  bool operator==(const SweepSpec&) const = default;
};

}  // namespace nveseem
