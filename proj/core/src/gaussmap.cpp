#include "thetagreen/gaussmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "thetagreen/errors.hpp"

namespace thetagreen {

BorderedMatrix bordered_matrix(const CVector& grad, const CMatrix& hess) {
  const auto g = grad.size();
  BorderedMatrix m = BorderedMatrix::Zero(g + 1, g + 1);
  m.topLeftCorner(g, g) = hess;
  m.topRightCorner(g, 1) = grad;
  m.bottomLeftCorner(1, g) = grad.transpose();
  return m;
}

namespace {

cd bordered_det(const CVector& grad, const CMatrix& hess) {
  const BorderedMatrix m = bordered_matrix(grad, hess);
  return Eigen::PartialPivLU<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGenus + 1, kMaxGenus + 1>>(m)
      .determinant();
}

}  // namespace

EtaValue eta_unchecked(const AbelianPoint& p, double eps) {
  const auto theta = theta_function(p.tau);
  const int g = p.tau.genus();
  const LatticeReduction red = reduce_modulo_lattice(p.tau, p.z);
  const ThetaJet j = theta->jet(red.z, eps, JetOrder::Hessian);

  EtaValue out;
  const cd scaled = bordered_det(j.scaled_grad, j.scaled_hess);
  const double log_det_y = std::log(p.tau.im_det());
  out.log_eta_norm = 0.25 * (g + 5) * log_det_y + std::log(std::abs(scaled));
  out.eta_norm = std::exp(out.log_eta_norm);
  out.theta_residual = std::pow(p.tau.im_det(), 0.25) * std::abs(j.scaled_value);

  // On the divisor the determinant picks up the automorphy factor to the power
  // g+1 under lattice translation; the gradient terms of the Hessian drop out.
  const CVector n = red.n.cast<double>().cast<cd>();
  const cd ii(0.0, 1.0);
  const cd log_a = -ii * kPi * (n.transpose() * p.tau.tau() * n).value() - 2.0 * ii * kPi * n.dot(red.z);
  const cd log_eta = std::log(scaled) + static_cast<double>(g + 1) * (j.log_scale + log_a);
  out.eta = std::exp(log_eta);
  return out;
}

EtaValue eta(const AbelianPoint& p, double eps) {
  const auto theta = theta_function(p.tau);
  const double residual = theta->norm(p.z, eps);
  if (residual > 1e-6 * theta->divisor_scale()) {
    std::ostringstream os;
    os << "point is not on the theta divisor (||theta|| = " << residual << ")";
    throw OffDivisorError(os.str(), residual);
  }
  return eta_unchecked(p, eps);
}

GaussPoint gauss_map(const AbelianPoint& p, double eps) {
  const auto theta = theta_function(p.tau);
  const double residual = theta->norm(p.z, eps);
  if (residual > 1e-6 * theta->divisor_scale()) {
    std::ostringstream os;
    os << "point is not on the theta divisor (||theta|| = " << residual << ")";
    throw OffDivisorError(os.str(), residual);
  }
  const CVector w = reduce_modulo_lattice(p.tau, p.z).z;
  const ThetaJet j = theta->jet(w, eps, JetOrder::Gradient);
  const double nrm = j.scaled_grad.norm();
  if (!(nrm >= 1e-8)) fail(ErrorKind::Singular, "vanishing theta gradient: singular point of the divisor");
  CVector v = j.scaled_grad / nrm;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-12) {
      const cd phase = std::abs(v(k)) / v(k);
      v *= phase;
      v(k) = std::abs(v(k));
      break;
    }
  }
  return {v};
}

bool is_ramified(const AbelianPoint& p, double tol, double eta_scale) {
  const auto theta = theta_function(p.tau);
  const double floor = std::pow(theta->divisor_scale(), p.tau.genus() + 1);
  const EtaValue e = eta(p);
  return e.eta_norm <= tol * std::max(eta_scale, floor);
}

double eta_scale(const PeriodMatrix& tau, const std::vector<CVector>& points) {
  if (points.empty()) fail(ErrorKind::InvalidInput, "empty sample for the eta scale");
  std::vector<double> v;
  v.reserve(points.size());
  for (const CVector& z : points) v.push_back(eta_unchecked({tau, z}).eta_norm);
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

}  // namespace thetagreen
