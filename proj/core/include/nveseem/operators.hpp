#pragma once

#include "nveseem/params.hpp"
#include "nveseem/types.hpp"

namespace nveseem {

// Spin-1 matrices in the (+1, 0, -1) basis.
struct Spin1Matrices {
  Matrix3c x, y, z;      // Cartesian components
  Matrix3c plus, minus;  // ladder operators, sqrt(2) elements
  Matrix3c id;
};
const Spin1Matrices& spin1_matrices();

// Kronecker product electron_op (x) nuclear_op with electron index major.
Matrix9c embed(const Matrix3c& electron_op, const Matrix3c& nuclear_op);

// B0 vector in the defect frame, Gauss.
Eigen::Vector3d field_vector(const SpinSystemParams& p);

// The four static Hamiltonian terms (all Hermitian, traceless, MHz) and
// their sum.
Matrix9c build_zfs(const SpinSystemParams& p);         // D(Sz^2 - 2/3) + E(Sx^2 - Sy^2)
Matrix9c build_zeeman(const SpinSystemParams& p);      // ge B0.S - gn B0.I
Matrix9c build_quadrupole(const SpinSystemParams& p);  // P(Iz^2 - 2/3)
Matrix9c build_hyperfine(const SpinSystemParams& p);   // Apar SzIz + Aperp(S+I- + S-I+)/2
Matrix9c build_static_hamiltonian(const SpinSystemParams& p);

}  // namespace nveseem
