#pragma once

#include <array>

#include "nveseem/params.hpp"
#include "nveseem/types.hpp"

namespace nveseem {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

// Zero-order eigenstates of the Cartesian spin-1 operators, in the
// (+1, 0, -1) basis.  The same construction serves the electron (psi) and
// the nucleus (phi):
//   psi_z = |0>,  psi_x = (-|+1> + |-1>)/sqrt(2),  psi_y = i(|+1> + |-1>)/sqrt(2)
Vector3c zero_order_state(Axis a);

// Diagonalized static Hamiltonian with physical labels.  Columns of
// `states` map the product basis to the eigenbasis; labels identify each
// eigenvector with the zero-order product state psi_e (x) phi_n making the
// dominant contribution.
struct EigenBasis {
  Vector9d freq;    // eigenvalues, MHz, ascending
  Matrix9c states;  // eigenvector columns; largest component real positive

  bool labeled = false;
  std::array<int, 9> label_col{};        // (e, n) -> column, index 3*e + n
  std::array<double, 9> label_overlap{}; // |<zero-order|state>|^2 of the assignment
  std::array<Axis, 9> col_electron{};    // column -> electron manifold label
  bool ambiguous = false;  // two labels contested a column (amplitude ratio < 1.2)

  // Drive operator Sx (x) 1 rotated into this basis, with its spectral
  // factors (eigenvalues are {-1, 0, +1}, each threefold).
  Matrix9c sx;
  Matrix9c sx_vecs;
  Vector9d sx_vals;

  int col(Axis electron, Axis nuclear) const {
    return label_col[3 * static_cast<int>(electron) + static_cast<int>(nuclear)];
  }
  double overlap(Axis electron, Axis nuclear) const {
    return label_overlap[3 * static_cast<int>(electron) + static_cast<int>(nuclear)];
  }
};

// Eigendecomposition only (throws NumericError on non-Hermitian input).
EigenBasis diagonalize(const Matrix9c& H);

// Bijective label assignment maximizing total squared overlap with the
// zero-order product states; degenerate phi_x/phi_y pairs tie-break to the
// lower column index for phi_x.
void label_states(EigenBasis& basis);

// build_static_hamiltonian + diagonalize + label_states.
EigenBasis make_basis(const SpinSystemParams& p);

// Central psi_z-manifold -> psi_y-manifold transition frequency: difference
// of nuclear-sublevel means.  This is the MW carrier used by the sequences.
double mw_frequency(const EigenBasis& basis);

}  // namespace nveseem
