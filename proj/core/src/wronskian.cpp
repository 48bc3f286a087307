#include <cmath>

#include "arakelov_internal.hpp"
#include "thetagreen/arakelov.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen {

namespace {

/// Orthonormal differentials omega_k = phi_k(x) dx and their x-derivatives,
/// from phi = O (1, x) / y and y' = f' / (2 y).
void phi_and_derivative(const CurveModel& c, const CurvePoint& p, Eigen::Vector2cd& phi, Eigen::Vector2cd& dphi) {
  const auto& f = c.f_coeffs();
  cd df = 0.0;
  for (int k = 5; k >= 1; --k) df = df * p.x + static_cast<double>(k) * f[k];
  const cd y = c.y(p);
  const cd dy = df / (2.0 * y);
  const Eigen::Matrix2cd o = c.ortho_basis();
  phi = o * Eigen::Vector2cd(1.0 / y, p.x / y);
  dphi = o * Eigen::Vector2cd(-dy / (y * y), 1.0 / y - p.x * dy / (y * y));
}

}  // namespace

double log_wronskian_norm(const ArakelovMetric& m, const CurvePoint& p, LocalChart chart) {
  const CurveModel& c = m.green().curve();
  if (p.at_infinity || c.is_weierstrass(p, 1e-10))
    fail(ErrorKind::Singular, "Wronskian norm is evaluated away from Weierstrass points");
  Eigen::Vector2cd phi, dphi;
  phi_and_derivative(c, p, phi, dphi);
  cd wr;
  if (chart == LocalChart::X) {
    wr = phi(0) * dphi(1) - phi(1) * dphi(0);
  } else {
    // t = 1/x: omega_k = psi_k(t) dt with psi = -phi(1/t) / t^2.
    const cd t = 1.0 / p.x;
    const cd dxdt = -1.0 / (t * t);
    const Eigen::Vector2cd psi = phi * dxdt;
    const Eigen::Vector2cd dpsi = dphi * dxdt * dxdt + phi * (2.0 / (t * t * t));
    wr = psi(0) * dpsi(1) - psi(1) * dpsi(0);
  }
  return std::log(std::abs(wr)) + 3.0 * m.log_dz_norm(p, chart).value;
}

double wronskian_norm(const ArakelovMetric& m, const CurvePoint& p, LocalChart chart) {
  return std::exp(log_wronskian_norm(m, p, chart));
}

}  // namespace thetagreen
