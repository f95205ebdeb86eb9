#pragma once

#include <array>

#include "nveseem/eigenbasis.hpp"
#include "nveseem/params.hpp"

namespace nveseem {

// The two zero-order triads (electron psi set and nuclear phi set share the
// construction); indexed by Axis.
struct ZeroOrderStates {
  std::array<Vector3c, 3> electron;
  std::array<Vector3c, 3> nuclear;
};
ZeroOrderStates zero_order_states();

// First-order transverse-field mixing scale gamma_e*B0/D.
double electron_mixing(const SpinSystemParams& p);

struct MixingReport {
  double delta = 0.0;         // gamma_e*B0/D
  double exact_delta = 0.0;   // psi_y content of the psi_z-labeled eigenvectors
  double second_order = 0.0;  // |gamma_e*B0*A_perp/(D*P)|
  double zfs_scale = 0.0;     // |A_perp/D|
  double ratio = 0.0;         // second_order / zfs_scale
  bool ratio_defined = true;  // false when P == 0
  // Hyperfine-induced product-state mixing, measured from eigenvectors (no
  // closed form): epsilon is the psi_x*phi_y amplitude in the (psi_y,phi_x)
  // state, epsilon_prime the psi_x*phi_x amplitude in the (psi_y,phi_y) one.
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
};

MixingReport second_order_report(const SpinSystemParams& p);
MixingReport second_order_report(const SpinSystemParams& p, const EigenBasis& basis);

// Nuclear transition frequencies responsible for the echo modulation:
// omega0 in the psi_z manifold, omega_plus in the psi_y manifold.  The
// modulating pair within each manifold is the one connected to the other
// manifold through the largest nuclear-state-changing Sx matrix elements
// (the weakly allowed transitions that beat against the allowed one).
struct FrequencyPrediction {
  double omega0 = 0.0;      // MHz
  double omega_plus = 0.0;  // MHz
  double sum = 0.0;         // omega0 + omega_plus
  double diff = 0.0;        // |omega0 - omega_plus|
};
FrequencyPrediction predicted_frequencies(const EigenBasis& basis);

// Energy separation of the psi_x- and psi_y-labeled manifolds,
// nuclear-averaged.
double psi_xy_splitting(const EigenBasis& basis);

}  // namespace nveseem
