#include "nveseem/eigenbasis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "nveseem/errors.hpp"
#include "nveseem/operators.hpp"

namespace nveseem {

Vector3c zero_order_state(Axis a) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector3c v;
  switch (a) {
    case Axis::X:
      v << -r, 0.0, r;
      break;
    case Axis::Y:
      v << complexd(0.0, r), 0.0, complexd(0.0, r);
      break;
    case Axis::Z:
    default:
      v << 0.0, 1.0, 0.0;
      break;
  }
  return v;
}

EigenBasis diagonalize(const Matrix9c& H) {
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericError("Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix9c> es(H);
  if (es.info() != Eigen::Success)
    throw NumericError("eigensolver failed to converge");

  EigenBasis b;
  b.freq = es.eigenvalues();
  b.states = es.eigenvectors();

  // Fix the arbitrary eigenvector phases: largest-magnitude component real
  // and positive (first such index on ties).
  for (int c = 0; c < 9; ++c) {
    int k = 0;
    double best = -1.0;
    for (int i = 0; i < 9; ++i) {
      const double a = std::abs(b.states(i, c));
      if (a > best) {
        best = a;
        k = i;
      }
    }
    if (best > 0.0) b.states.col(c) *= std::conj(b.states(k, c)) / best;
  }

  const Matrix9c sx_prod = embed(spin1_matrices().x, spin1_matrices().id);
  b.sx = b.states.adjoint() * sx_prod * b.states;
  Eigen::SelfAdjointEigenSolver<Matrix9c> esx(b.sx);
  if (esx.info() != Eigen::Success)
    throw NumericError("eigensolver failed on the drive operator");
  b.sx_vals = esx.eigenvalues();
  b.sx_vecs = esx.eigenvectors();
  return b;
}

void label_states(EigenBasis& basis) {
  // Overlap amplitudes of every (electron, nuclear) zero-order product state
  // with every eigenvector; labels indexed 3*e + n.
  double amp[9][9];
  for (int e = 0; e < 3; ++e) {
    for (int n = 0; n < 3; ++n) {
      Vector9c zo;
      const Vector3c pe = zero_order_state(static_cast<Axis>(e));
      const Vector3c pn = zero_order_state(static_cast<Axis>(n));
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) zo(3 * i + k) = pe(i) * pn(k);
      for (int c = 0; c < 9; ++c)
        amp[3 * e + n][c] = std::abs(zo.dot(basis.states.col(c)));
    }
  }

  // Bijective assignment maximizing the total squared overlap: DP over
  // column subsets, label popcount(mask)-1 placed last.
  constexpr int kFull = (1 << 9) - 1;
  std::vector<double> dp(kFull + 1, -std::numeric_limits<double>::infinity());
  std::vector<int> parent(kFull + 1, -1);
  dp[0] = 0.0;
  for (int mask = 1; mask <= kFull; ++mask) {
    const int label = std::popcount(static_cast<unsigned>(mask)) - 1;
    for (int c = 0; c < 9; ++c) {
      if (!(mask & (1 << c))) continue;
      const double cand = dp[mask ^ (1 << c)] + amp[label][c] * amp[label][c];
      if (cand > dp[mask] + 1e-15) {
        dp[mask] = cand;
        parent[mask] = c;
      }
    }
  }
  int mask = kFull;
  while (mask) {
    const int label = std::popcount(static_cast<unsigned>(mask)) - 1;
    const int c = parent[mask];
    basis.label_col[label] = c;
    mask ^= 1 << c;
  }

  // phi_x and phi_y of one electron manifold can be exactly degenerate in
  // overlap (axial field); break the tie toward phi_x on the lower column.
  for (int e = 0; e < 3; ++e) {
    const int lx = 3 * e + static_cast<int>(Axis::X);
    const int ly = 3 * e + static_cast<int>(Axis::Y);
    int& cx = basis.label_col[lx];
    int& cy = basis.label_col[ly];
    const double keep = amp[lx][cx] * amp[lx][cx] + amp[ly][cy] * amp[ly][cy];
    const double swap = amp[lx][cy] * amp[lx][cy] + amp[ly][cx] * amp[ly][cx];
    if (std::abs(keep - swap) < 1e-12 && cx > cy) std::swap(cx, cy);
  }

  for (int label = 0; label < 9; ++label) {
    const int c = basis.label_col[label];
    basis.label_overlap[label] = amp[label][c] * amp[label][c];
    basis.col_electron[c] = static_cast<Axis>(label / 3);
  }

  // A column is contested when its two best candidate labels have nearly
  // equal overlap amplitude.
  basis.ambiguous = false;
  for (int c = 0; c < 9; ++c) {
    double top = 0.0, second = 0.0;
    for (int label = 0; label < 9; ++label) {
      const double a = amp[label][c];
      if (a > top) {
        second = top;
        top = a;
      } else if (a > second) {
        second = a;
      }
    }
    if (second > 0.0 && top / second < 1.2) basis.ambiguous = true;
  }
  basis.labeled = true;
}

EigenBasis make_basis(const SpinSystemParams& p) {
  EigenBasis b = diagonalize(build_static_hamiltonian(p));
  label_states(b);
  return b;
}

double mw_frequency(const EigenBasis& basis) {
  double fy = 0.0, fz = 0.0;
  for (int n = 0; n < 3; ++n) {
    fy += basis.freq(basis.col(Axis::Y, static_cast<Axis>(n)));
    fz += basis.freq(basis.col(Axis::Z, static_cast<Axis>(n)));
  }
  return (fy - fz) / 3.0;
}

}  // namespace nveseem
