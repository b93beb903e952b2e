#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cssqkd {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;

/// Largest qubit count a single dense register may span (dimension 2^12).
inline constexpr int kDenseQubitLimit = 12;

}  // namespace cssqkd
