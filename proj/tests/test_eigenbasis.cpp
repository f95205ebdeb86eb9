#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include <nveseem/eigenbasis.hpp>
#include <nveseem/errors.hpp>
#include <nveseem/operators.hpp>

#include "test_util.hpp"

using namespace nveseem;
using testutil::max_abs;

TEST_SUITE("eigenbasis") {

TEST_CASE("zero-order triad") {
  const auto& s = spin1_matrices();
  const Vector3c z = zero_order_state(Axis::Z);
  const Vector3c x = zero_order_state(Axis::X);
  const Vector3c y = zero_order_state(Axis::Y);

  // Each is the 0-eigenvector of its Cartesian operator.
  CHECK((s.z * z).norm() < 1e-15);
  CHECK((s.x * x).norm() < 1e-15);
  CHECK((s.y * y).norm() < 1e-15);

  // Orthonormal triad.
  CHECK(std::abs(z.norm() - 1.0) < 1e-15);
  CHECK(std::abs(x.norm() - 1.0) < 1e-15);
  CHECK(std::abs(y.norm() - 1.0) < 1e-15);
  CHECK(std::abs(z.dot(x)) < 1e-15);
  CHECK(std::abs(z.dot(y)) < 1e-15);
  CHECK(std::abs(x.dot(y)) < 1e-15);
}

TEST_CASE("diagonalize reconstructs the Hamiltonian") {
  const SpinSystemParams p;
  const Matrix9c h = build_static_hamiltonian(p);
  const EigenBasis b = diagonalize(h);

  // ascending eigenvalues
  for (int k = 0; k + 1 < 9; ++k) CHECK(b.freq(k) <= b.freq(k + 1));

  // V^dag H V is diagonal
  const Matrix9c d = b.states.adjoint() * h * b.states;
  Matrix9c off = d;
  off.diagonal().setZero();
  CHECK(max_abs(off) < 1e-9);

  // V Lambda V^dag = H
  const Matrix9c hr =
      b.states * b.freq.cast<complexd>().asDiagonal() * b.states.adjoint();
  CHECK(max_abs(hr - h) < 1e-9);

  // orthonormal columns
  CHECK(max_abs(b.states.adjoint() * b.states - Matrix9c::Identity()) < 1e-12);
}

TEST_CASE("frozen spectrum at the default working point") {
  const EigenBasis b = make_basis(SpinSystemParams{});
  const double want[9] = {-1930.3331082021, -1930.3119759098, -1925.2522966461,
                          951.9863637393,   951.9872388955,   957.2770945629,
                          973.2705925958,   973.2851842742,   978.0909066903};
  for (int k = 0; k < 9; ++k)
    CHECK(std::abs(b.freq(k) - want[k]) < 1e-6);
}

TEST_CASE("eigenvector phase: largest component real positive") {
  const EigenBasis b = make_basis(SpinSystemParams{});
  for (int c = 0; c < 9; ++c) {
    int imax = 0;
    double amax = 0.0;
    for (int r = 0; r < 9; ++r) {
      const double a = std::abs(b.states(r, c));
      if (a > amax) {
        amax = a;
        imax = r;
      }
    }
    CHECK(b.states(imax, c).real() > 0.0);
    CHECK(std::abs(b.states(imax, c).imag()) < 1e-12);
  }
}

TEST_CASE("diagonal input yields identity columns") {
  Matrix9c h = Matrix9c::Zero();
  const double d[9] = {3, 1, 2, 5, 4, 0, 8, 6, 7};
  for (int k = 0; k < 9; ++k) h(k, k) = d[k];
  const EigenBasis b = diagonalize(h);
  for (int c = 0; c < 9; ++c) {
    int ones = 0;
    for (int r = 0; r < 9; ++r) {
      const double a = std::abs(b.states(r, c));
      if (a > 0.5) {
        ++ones;
        CHECK(std::abs(b.states(r, c) - complexd(1.0, 0.0)) < 1e-12);
      } else {
        CHECK(a < 1e-12);
      }
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  Matrix9c h = Matrix9c::Zero();
  h(0, 1) = 1.0;  // no conjugate partner
  CHECK_THROWS_AS(diagonalize(h), NumericError);
}

TEST_CASE("labels are bijective and confident at defaults") {
  const EigenBasis b = make_basis(SpinSystemParams{});
  REQUIRE(b.labeled);
  CHECK_FALSE(b.ambiguous);

  std::array<bool, 9> seen{};
  for (int k = 0; k < 9; ++k) {
    const int c = b.label_col[k];
    REQUIRE(c >= 0);
    REQUIRE(c < 9);
    CHECK_FALSE(seen[c]);
    seen[c] = true;
  }

  // col_electron agrees with the assignment
  for (int e = 0; e < 3; ++e)
    for (int n = 0; n < 3; ++n)
      CHECK(b.col_electron[b.col(static_cast<Axis>(e), static_cast<Axis>(n))] ==
            static_cast<Axis>(e));

  // every assignment is dominated by its zero-order state
  for (int k = 0; k < 9; ++k) CHECK(b.label_overlap[k] > 0.9);
}

TEST_CASE("z-manifold overlap deficit matches the mixing scale") {
  // label_overlap is a squared amplitude, so the transverse-field admixture
  // of the neighbouring electron manifold costs each psi_z-labelled column
  // ~delta^2 of its product-state weight.  The nuclear pair split by the
  // quadrupole gap takes additional second-order mixing on top, so the
  // deficit sits between delta^2 and a small multiple of it, and the
  // least-mixed nuclear sublevel sits on the electron-only floor.
  const SpinSystemParams p;
  const EigenBasis b = make_basis(p);
  const double delta = p.gamma_e * p.B0_mag / p.D;
  const double floor_sq = delta * delta;
  double min_deficit = 1.0;
  for (int n = 0; n < 3; ++n) {
    const double deficit = 1.0 - b.overlap(Axis::Z, static_cast<Axis>(n));
    CHECK(deficit > 0.8 * floor_sq);
    CHECK(deficit < 3.0 * floor_sq);
    min_deficit = std::min(min_deficit, deficit);
  }
  CHECK(min_deficit == doctest::Approx(floor_sq).epsilon(0.10));
}

TEST_CASE("field reversal leaves overlap magnitudes unchanged") {
  SpinSystemParams p;
  const EigenBasis b1 = make_basis(p);
  p.B0_mag = -p.B0_mag;
  const EigenBasis b2 = make_basis(p);
  for (int k = 0; k < 9; ++k)
    CHECK(std::abs(b1.label_overlap[k] - b2.label_overlap[k]) < 1e-9);
}

TEST_CASE("labels are stable against small field changes") {
  SpinSystemParams p;
  const EigenBasis b0 = make_basis(p);
  for (double db : {-0.1, 0.1}) {
    SpinSystemParams q = p;
    q.B0_mag = p.B0_mag + db;
    const EigenBasis b = make_basis(q);
    for (int k = 0; k < 9; ++k) CHECK(b.label_col[k] == b0.label_col[k]);
  }
}

TEST_CASE("unmixed limit: B0 = 0, no hyperfine") {
  SpinSystemParams p;
  p.B0_mag = 0.0;
  p.A_par = p.A_perp = 0.0;  // keep E and P
  const EigenBasis b = make_basis(p);
  REQUIRE(b.labeled);

  // phi_z columns are exact product states (nondegenerate)
  for (int e = 0; e < 3; ++e)
    CHECK(b.overlap(static_cast<Axis>(e), Axis::Z) ==
          doctest::Approx(1.0).epsilon(1e-12));

  // the electron factor of every labeled column is exact: the column lies
  // entirely inside its psi_e (x) C^3 subspace
  for (int e = 0; e < 3; ++e) {
    const Vector3c psi = zero_order_state(static_cast<Axis>(e));
    const Matrix9c proj = embed(psi * psi.adjoint(), Matrix3c::Identity());
    for (int n = 0; n < 3; ++n) {
      const int c = b.col(static_cast<Axis>(e), static_cast<Axis>(n));
      const Vector9c v = b.states.col(c);
      CHECK(std::abs((proj * v).squaredNorm() - 1.0) < 1e-12);
    }
  }

  // the m_n = +/-1 quadrupole pair is degenerate: whatever nuclear vectors
  // the solver picks inside that plane, the optimal phi_x/phi_y assignment
  // keeps at least half the weight on each
  for (int e = 0; e < 3; ++e) {
    CHECK(b.overlap(static_cast<Axis>(e), Axis::X) >= 0.5 - 1e-9);
    CHECK(b.overlap(static_cast<Axis>(e), Axis::Y) >= 0.5 - 1e-9);
  }

  // deterministic tie-break: a second pass gives the identical assignment
  const EigenBasis b2 = make_basis(p);
  for (int k = 0; k < 9; ++k) CHECK(b.label_col[k] == b2.label_col[k]);
}

TEST_CASE("frozen MW carrier frequency") {
  const EigenBasis b = make_basis(SpinSystemParams{});
  CHECK(std::abs(mw_frequency(b) - 2903.5146881061) < 1e-6);
}

TEST_CASE("drive operator in the eigenbasis") {
  const EigenBasis b = make_basis(SpinSystemParams{});
  // sx is Hermitian with eigenvalues {-1, 0, +1}, each threefold
  CHECK(max_abs(b.sx - b.sx.adjoint()) < 1e-12);
  std::array<double, 9> want{-1, -1, -1, 0, 0, 0, 1, 1, 1};
  for (int k = 0; k < 9; ++k) CHECK(std::abs(b.sx_vals(k) - want[k]) < 1e-9);
  const Matrix9c rebuilt =
      b.sx_vecs * b.sx_vals.cast<complexd>().asDiagonal() * b.sx_vecs.adjoint();
  CHECK(max_abs(rebuilt - b.sx) < 1e-9);
}

}  // TEST_SUITE
