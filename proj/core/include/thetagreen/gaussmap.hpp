#pragma once

#include "thetagreen/theta.hpp"

namespace thetagreen {

class CurveModel;
struct QuadratureConfig;

/// The bordered determinant eta = det [[theta_ij, theta_i], [theta_j, 0]].
struct EtaValue {
  cd eta{};                  // at the point as given
  double eta_norm = 0.0;     // (det Y)^{(g+5)/4} e^{-pi (g+1) y^t Y^-1 y} |eta|
  double log_eta_norm = 0.0; // computed from the lattice-reduced point, never overflows
  double theta_residual = 0.0;
};

/// Unit-norm representative of the projective gradient class; the first
/// nonzero coordinate is real and positive.
struct GaussPoint {
  CVector coords;
};

/// Bordered matrix of a jet (plain or scaled components).
BorderedMatrix bordered_matrix(const CVector& grad, const CMatrix& hess);

/// Requires on_theta_divisor(p, 1e-6); throws OffDivisorError otherwise.
EtaValue eta(const AbelianPoint& p, double eps = 1e-12);

/// Same computation without the divisor-membership precondition. Used where the
/// point is known to lie on the divisor only up to quadrature accuracy.
EtaValue eta_unchecked(const AbelianPoint& p, double eps = 1e-12);

GaussPoint gauss_map(const AbelianPoint& p, double eps = 1e-12);

/// eta_norm(p) <= tol * scale, with scale = max(eta_scale, divisor_scale^{g+1}).
/// The floor keeps the test meaningful when eta vanishes identically.
bool is_ramified(const AbelianPoint& p, double tol, double eta_scale);

/// Median eta_norm over the given divisor points.
double eta_scale(const PeriodMatrix& tau, const std::vector<CVector>& points);

/// Integral of log ||eta|| over the theta divisor of a genus-2 Jacobian, pulled
/// back to the curve: int_X log ||eta||(j(x)) nu(x).
Estimate eta_invariant(const CurveModel& c, const QuadratureConfig& q);

/// Local minimum of ||eta|| along the sweep path, refined by golden section.
struct EtaZero {
  double parameter = 0.0;
  double eta_norm = 0.0;
  double distance_to_weierstrass = 0.0;  // torus metric, to the nearest image
  int weierstrass_index = -1;            // index into weierstrass_points()
};

/// ||eta|| along a path on the curve that runs from infinity through the five
/// finite branch points (in order) and back out to infinity. The path
/// parameter runs over [0, 6]; piece k covers [k, k+1].
struct EtaSweep {
  std::vector<double> parameter;
  std::vector<double> log_eta_norm;
  double scale = 0.0;           // median ||eta|| over the sweep
  std::vector<EtaZero> zeros;   // minima with ||eta|| <= zero_tol * scale
};

EtaSweep eta_zero_sweep(const CurveModel& c, int n_points = 2000, double zero_tol = 1e-3);

}  // namespace thetagreen
