#include "nveseem/perturbation.hpp"

#include <cmath>
#include <limits>

namespace nveseem {

namespace {

// Zero-order product state psi_e (x) phi_n as a 9-vector.
Vector9c product_state(Axis e, Axis n) {
  const Vector3c pe = zero_order_state(e);
  const Vector3c pn = zero_order_state(n);
  Vector9c v;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) v(3 * i + k) = pe(i) * pn(k);
  return v;
}

}  // namespace

ZeroOrderStates zero_order_states() {
  ZeroOrderStates z;
  for (int a = 0; a < 3; ++a) {
    z.electron[a] = zero_order_state(static_cast<Axis>(a));
    z.nuclear[a] = zero_order_state(static_cast<Axis>(a));
  }
  return z;
}

double electron_mixing(const SpinSystemParams& p) {
  return p.gamma_e * p.B0_mag / p.D;
}

MixingReport second_order_report(const SpinSystemParams& p) {
  return second_order_report(p, make_basis(p));
}

MixingReport second_order_report(const SpinSystemParams& p,
                                 const EigenBasis& basis) {
  MixingReport r;
  r.delta = electron_mixing(p);
  r.zfs_scale = std::abs(p.A_perp / p.D);
  r.ratio_defined = p.P != 0.0;
  if (r.ratio_defined) {
    r.second_order = std::abs(p.gamma_e * p.B0_mag * p.A_perp / (p.D * p.P));
    r.ratio = r.second_order / r.zfs_scale;
  } else {
    r.second_order = std::numeric_limits<double>::quiet_NaN();
    r.ratio = std::numeric_limits<double>::quiet_NaN();
  }

  // psi_y admixture actually present in the psi_z-labeled eigenvectors,
  // averaged over the nuclear sublevels.
  double acc = 0.0;
  for (int n = 0; n < 3; ++n) {
    const Vector9c v =
        basis.states.col(basis.col(Axis::Z, static_cast<Axis>(n)));
    double s = 0.0;
    for (int np = 0; np < 3; ++np)
      s += std::norm(product_state(Axis::Y, static_cast<Axis>(np)).dot(v));
    acc += std::sqrt(s);
  }
  r.exact_delta = acc / 3.0;

  r.epsilon = std::abs(product_state(Axis::X, Axis::Y)
                           .dot(basis.states.col(basis.col(Axis::Y, Axis::X))));
  r.epsilon_prime =
      std::abs(product_state(Axis::X, Axis::X)
                   .dot(basis.states.col(basis.col(Axis::Y, Axis::Y))));
  return r;
}

namespace {

// Within one electron manifold, pick the nuclear-sublevel pair whose two
// members are both most strongly connected to some state of the other
// manifold by the drive: that pair's splitting is what beats against the
// allowed transition and modulates the echo.
double manifold_gap(const EigenBasis& basis, Axis e, Axis other) {
  int cols[3], ocols[3];
  for (int n = 0; n < 3; ++n) {
    cols[n] = basis.col(e, static_cast<Axis>(n));
    ocols[n] = basis.col(other, static_cast<Axis>(n));
  }
  double best_score = -1.0;
  double gap = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      double score = 0.0;
      for (int c : ocols)
        score = std::max(score, std::abs(basis.sx(cols[a], c)) *
                                    std::abs(basis.sx(cols[b], c)));
      if (score > best_score) {
        best_score = score;
        gap = std::abs(basis.freq(cols[a]) - basis.freq(cols[b]));
      }
    }
  }
  return gap;
}

}  // namespace

FrequencyPrediction predicted_frequencies(const EigenBasis& basis) {
  FrequencyPrediction f;
  f.omega0 = manifold_gap(basis, Axis::Z, Axis::Y);
  f.omega_plus = manifold_gap(basis, Axis::Y, Axis::Z);
  f.sum = f.omega0 + f.omega_plus;
  f.diff = std::abs(f.omega0 - f.omega_plus);
  return f;
}

double psi_xy_splitting(const EigenBasis& basis) {
  double fx = 0.0, fy = 0.0;
  for (int n = 0; n < 3; ++n) {
    fx += basis.freq(basis.col(Axis::X, static_cast<Axis>(n)));
    fy += basis.freq(basis.col(Axis::Y, static_cast<Axis>(n)));
  }
  return std::abs(fx - fy) / 3.0;
}

}  // namespace nveseem
