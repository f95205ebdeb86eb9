#include "nveseem/operators.hpp"

#include <cmath>

namespace nveseem {

const Spin1Matrices& spin1_matrices() {
  static const Spin1Matrices m = [] {
    Spin1Matrices s;
    const double r2 = std::sqrt(2.0);
    s.plus.setZero();
    s.plus(0, 1) = r2;
    s.plus(1, 2) = r2;
    s.minus = s.plus.adjoint();
    s.x = (s.plus + s.minus) / 2.0;
    s.y = (s.plus - s.minus) / complexd(0.0, 2.0);
    s.z.setZero();
    s.z(0, 0) = 1.0;
    s.z(2, 2) = -1.0;
    s.id.setIdentity();
    return s;
  }();
  return m;
}

Matrix9c embed(const Matrix3c& electron_op, const Matrix3c& nuclear_op) {
  Matrix9c out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.block<3, 3>(3 * i, 3 * j) = electron_op(i, j) * nuclear_op;
  return out;
}

Eigen::Vector3d field_vector(const SpinSystemParams& p) {
  const double st = std::sin(p.B0_theta), ct = std::cos(p.B0_theta);
  const double sp = std::sin(p.B0_phi), cp = std::cos(p.B0_phi);
  return p.B0_mag * Eigen::Vector3d(st * cp, st * sp, ct);
}

Matrix9c build_zfs(const SpinSystemParams& p) {
  const auto& s = spin1_matrices();
  const Matrix3c sz2 = s.z * s.z;
  const Matrix3c sx2 = s.x * s.x;
  const Matrix3c sy2 = s.y * s.y;
  // -2/3 subtracts the spin-1 average of Sz^2, making the term traceless.
  return embed(p.D * (sz2 - (2.0 / 3.0) * s.id) + p.E * (sx2 - sy2), s.id);
}

Matrix9c build_zeeman(const SpinSystemParams& p) {
  const auto& s = spin1_matrices();
  const Eigen::Vector3d B = field_vector(p);
  const Matrix3c eB = B(0) * s.x + B(1) * s.y + B(2) * s.z;
  // Electron and nuclear moments precess in opposite senses in these sign
  // conventions: + gamma_e B.S and - gamma_n B.I.
  return p.gamma_e * embed(eB, s.id) - p.gamma_n * embed(s.id, eB);
}

Matrix9c build_quadrupole(const SpinSystemParams& p) {
  const auto& s = spin1_matrices();
  const Matrix3c iz2 = s.z * s.z;
  return p.P * embed(s.id, iz2 - (2.0 / 3.0) * s.id);
}

Matrix9c build_hyperfine(const SpinSystemParams& p) {
  const auto& s = spin1_matrices();
  return p.A_par * embed(s.z, s.z) +
         0.5 * p.A_perp * (embed(s.plus, s.minus) + embed(s.minus, s.plus));
}

Matrix9c build_static_hamiltonian(const SpinSystemParams& p) {
  return build_zfs(p) + build_zeeman(p) + build_quadrupole(p) +
         build_hyperfine(p);
}

}  // namespace nveseem
