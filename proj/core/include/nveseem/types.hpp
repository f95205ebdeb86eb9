#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nveseem {

// 9-dim product space |m_s> (x) |m_n>, electron index major, both spins
// ordered (+1, 0, -1).  All Hamiltonian entries are linear frequencies in
// MHz; time is in microseconds; the 2*pi lives in the propagator exponents.
using complexd = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;
using Matrix9c = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9c = Eigen::Matrix<std::complex<double>, 9, 1>;
using Vector9d = Eigen::Matrix<double, 9, 1>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double deg_per_rad_divisor = pi / 180.0;  // rad = deg * this

}  // namespace nveseem
