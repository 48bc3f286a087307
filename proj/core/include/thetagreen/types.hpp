#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace thetagreen {

/// Largest genus handled by the theta kernel. Fixed-capacity Eigen types keep
/// the hot loops free of heap traffic.
inline constexpr int kMaxGenus = 3;

using cd = std::complex<double>;

using CVector = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxGenus, 1>;
using RVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxGenus, 1>;
using IVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, 0, kMaxGenus, 1>;
using CMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGenus, kMaxGenus>;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGenus, kMaxGenus>;
using IMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGenus, kMaxGenus>;

/// (g+1)x(g+1) bordered matrices.
using BorderedMatrix =
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGenus + 1, kMaxGenus + 1>;

/// A number produced by quadrature or sampling together with its error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace thetagreen
