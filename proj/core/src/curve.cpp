#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "curve_internal.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen {

using detail::Atlas;
using detail::ChartPoint;
using detail::CurveData;

namespace {

ChartPoint chart_point(const CurveModel& c, const CurvePoint& p) {
  ChartPoint q;
  q.at_infinity = p.at_infinity;
  if (!p.at_infinity) {
    q.x = p.x;
    q.y = c.y(p);
  }
  return q;
}

CVector to_cvector(const Eigen::Vector2cd& v) { return CVector(v); }

/// Index of the half-period (a + tau b)/2 that makes AJ(P) - kappa land on the
/// theta divisor for a handful of generic points; it must be the only one.
CVector select_riemann_constant(const CurveModel& c) {
  const PeriodMatrix& t = c.tau();
  const ThetaFunction& th = c.theta();
  const double scale = th.divisor_scale();
  const cd probes[] = {cd(0.31, 0.17), cd(-0.42, 0.55), cd(0.73, -0.61), cd(-0.15, -0.38), cd(1.21, 0.44)};
  std::vector<std::pair<double, CVector>> scored;
  for (int bits = 0; bits < 16; ++bits) {
    Eigen::Vector2d a((bits >> 0) & 1, (bits >> 1) & 1), b((bits >> 2) & 1, (bits >> 3) & 1);
    const CVector k = 0.5 * (a.cast<cd>() + t.tau() * b.cast<cd>());
    double worst = 0.0;
    for (cd x : probes) {
      CurvePoint p = CurvePoint::finite(x, 1);
      if (detail::distance_to_roots(c.branch_points(), x) < 1e-3) p.x += 0.1;
      const CVector z = abel_jacobi_vector(c, p) - k;
      worst = std::max(worst, th.norm(z) / scale);
    }
    scored.emplace_back(worst, k);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  if (scored[0].first > 1e-6 || scored[1].first < 1e-3) {
    std::ostringstream os;
    os << "Riemann constant is not pinned down (best residual " << scored[0].first << ", runner-up "
       << scored[1].first << ")";
    fail(ErrorKind::Inconsistent, os.str());
  }
  return scored[0].second;
}

double relative_period_change(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

CurvePoint involution(const CurvePoint& p) {
  if (p.at_infinity) return p;
  return CurvePoint::finite(p.x, -p.sheet);
}

DivisorOnCurve involution(const DivisorOnCurve& d) {
  DivisorOnCurve out;
  for (const CurvePoint& p : d.points) out.points.push_back(involution(p));
  return out;
}

void QuadratureConfig::validate() const {
  if (n_nodes < 100) fail(ErrorKind::InvalidInput, "quadrature needs at least 100 nodes");
  if (refinement_levels < 1) fail(ErrorKind::InvalidInput, "refinement_levels must be positive");
}

const std::array<cd, 6>& CurveModel::f_coeffs() const { return data_->coeffs; }
const std::vector<cd>& CurveModel::branch_points() const { return data_->roots; }
const CMatrix& CurveModel::period_a() const { return data_->period_a; }
const CMatrix& CurveModel::period_b() const { return data_->period_b; }
const PeriodMatrix& CurveModel::tau() const { return *data_->tau; }
const CMatrix& CurveModel::gram() const { return data_->gram; }
const CMatrix& CurveModel::ortho_basis() const { return data_->ortho; }
const CVector& CurveModel::riemann_constant() const { return data_->kappa; }
const ThetaFunction& CurveModel::theta() const { return *data_->theta; }
double CurveModel::period_path_delta() const { return data_->path_delta; }
int CurveModel::period_nodes() const { return data_->period_nodes; }

cd CurveModel::f(cd x) const {
  cd v = data_->coeffs[5];
  for (int k = 4; k >= 0; --k) v = v * x + data_->coeffs[k];
  return v;
}

cd CurveModel::y(const CurvePoint& p) const {
  if (p.at_infinity) fail(ErrorKind::Domain, "y is not finite at infinity");
  return static_cast<double>(p.sheet) * detail::y_branch(data_->roots, p.x);
}

CurvePoint CurveModel::point_with_y(cd x, cd y) const {
  const cd yb = detail::y_branch(data_->roots, x);
  return CurvePoint::finite(x, std::abs(y - yb) <= std::abs(y + yb) ? 1 : -1);
}

bool CurveModel::is_weierstrass(const CurvePoint& p, double tol) const {
  if (p.at_infinity) return true;
  return detail::distance_to_roots(data_->roots, p.x) <= tol * (1.0 + std::abs(p.x));
}

std::vector<CurvePoint> CurveModel::weierstrass_points() const {
  std::vector<CurvePoint> out;
  for (cd e : data_->roots) out.push_back(CurvePoint::finite(e, 1));
  out.push_back(CurvePoint::infinity());
  return out;
}

CurveModel build_curve(const std::vector<cd>& c0_to_c4) {
  if (c0_to_c4.size() != 5) fail(ErrorKind::InvalidInput, "expected the five coefficients c0..c4");
  std::array<cd, 6> c{};
  for (int i = 0; i < 5; ++i) c[i] = c0_to_c4[i];
  c[5] = 1.0;
  return build_curve(c);
}

CurveModel build_curve(const std::array<cd, 6>& coeffs) {
  for (cd v : coeffs)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::InvalidInput, "curve coefficients must be finite");
  if (std::abs(coeffs[5] - 1.0) > 1e-14) fail(ErrorKind::InvalidInput, "f must be monic of degree 5");

  auto data = std::make_shared<CurveData>();
  data->coeffs = coeffs;
  data->roots = detail::quintic_roots(coeffs);
  detail::sort_branch_points(data->roots);
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data->roots.size(); ++i)
    for (std::size_t j = i + 1; j < data->roots.size(); ++j)
      min_dist = std::min(min_dist, std::abs(data->roots[i] - data->roots[j]));
  if (min_dist < 1e-6) {
    std::ostringstream os;
    os << "f has (nearly) repeated roots: minimum root distance " << min_dist;
    fail(ErrorKind::IllConditioned, os.str());
  }

  const detail::LoopPeriods loops = detail::loop_periods(data->roots, 0.5);
  const detail::Homology hom = detail::symplectic_periods(loops);
  if (hom.asymmetry > 1e-10) {
    std::ostringstream os;
    os << "period matrix fails the Riemann relations (asymmetry " << hom.asymmetry << ")";
    fail(ErrorKind::Inconsistent, os.str());
  }
  data->period_a = hom.period_a;
  data->period_b = hom.period_b;
  data->period_nodes = loops.nodes;

  // an independent family of loops (different ellipses, doubled nodes) in the same basis
  detail::LoopPeriods alt = detail::loop_periods(data->roots, 0.3, 2 * loops.nodes);
  // each loop is lifted from its own start point, so the sheet (and hence the
  // sign of the lifted cycle) is only fixed up to -1
  for (int k = 0; k < 4; ++k)
    if ((alt.values.col(k) + loops.values.col(k)).norm() < (alt.values.col(k) - loops.values.col(k)).norm())
      alt.values.col(k) *= -1.0;
  const Eigen::Matrix<cd, 2, 4> cyc = alt.values * hom.basis.transpose().cast<double>().cast<cd>();
  data->path_delta = std::max(relative_period_change(cyc.leftCols(2), hom.period_a),
                              relative_period_change(cyc.rightCols(2), hom.period_b));

  const Eigen::Matrix2cd pa = hom.period_a;
  const Eigen::Matrix2cd ainv = pa.inverse();
  data->omega_a_inv = ainv;
  const CMatrix tau = ainv * Eigen::Matrix2cd(hom.period_b);
  data->tau.emplace(tau);

  const Eigen::Matrix2cd gram = pa * data->tau->im().cast<cd>() * pa.adjoint();
  data->gram = 0.5 * (gram + gram.adjoint());
  Eigen::LLT<Eigen::Matrix2cd> llt(Eigen::Matrix2cd(data->gram));
  if (llt.info() != Eigen::Success) fail(ErrorKind::Inconsistent, "Hodge form is not positive definite");
  const Eigen::Matrix2cd l = llt.matrixL();
  data->ortho = l.inverse();

  data->theta = theta_function(*data->tau);
  data->atlas = std::make_unique<Atlas>(*data);

  CurveModel model(data);
  data->kappa = select_riemann_constant(model);
  return model;
}

CVector abel_jacobi_vector(const CurveModel& c, const CurvePoint& p) {
  if (p.at_infinity) return CVector::Zero(2);
  const Atlas& atlas = *c.data().atlas;
  const detail::Location loc = atlas.locate(chart_point(c, p));
  return to_cvector(static_cast<double>(loc.sign) * atlas.aj(atlas.chart(loc.chart), loc.u));
}

CVector abel_jacobi_by_path(const CurveModel& c, const CurvePoint& p) {
  if (p.at_infinity) return CVector::Zero(2);
  return to_cvector(c.data().atlas->path_aj(p.x, c.y(p)));
}

AbelianPoint abel_jacobi(const CurveModel& c, const CurvePoint& p) {
  return {c.tau(), reduce_modulo_lattice(c.tau(), abel_jacobi_vector(c, p)).z};
}

AbelianPoint abel_jacobi(const CurveModel& c, const DivisorOnCurve& d) {
  CVector z = CVector::Zero(2);
  for (const CurvePoint& p : d.points) z += abel_jacobi_vector(c, p);
  return {c.tau(), reduce_modulo_lattice(c.tau(), z).z};
}

AbelianPoint divisor_to_theta_point(const CurveModel& c, const DivisorOnCurve& d) {
  if (d.degree() != 1) fail(ErrorKind::InvalidInput, "divisor must have degree g - 1 = 1");
  const CVector z = abel_jacobi_vector(c, d.points[0]) - c.riemann_constant();
  return {c.tau(), reduce_modulo_lattice(c.tau(), z).z};
}

CVector ortho_differentials_x(const CurveModel& c, const CurvePoint& p) {
  if (p.at_infinity) fail(ErrorKind::Domain, "the x-chart does not contain infinity");
  if (c.is_weierstrass(p, 1e-14)) fail(ErrorKind::Singular, "the x-chart is singular at a branch point");
  const cd y = c.y(p);
  return c.ortho_basis() * Eigen::Vector2cd(1.0, p.x) / y;
}

double nu_density(const CurveModel& c, const CurvePoint& p) {
  if (p.at_infinity) fail(ErrorKind::Domain, "the x-chart does not contain infinity");
  if (c.is_weierstrass(p, 1e-14)) fail(ErrorKind::Singular, "nu has an integrable pole at a branch point in the x-chart");
  const Eigen::Vector2cd w = Eigen::Matrix2cd(c.ortho_basis()) * Eigen::Vector2cd(1.0, p.x);
  return 0.5 * w.squaredNorm() / std::abs(c.f(p.x));
}

double pullback_mu_density(const CurveModel& c, const CurvePoint& p) {
  if (p.at_infinity) fail(ErrorKind::Domain, "the x-chart does not contain infinity");
  if (c.is_weierstrass(p, 1e-14)) fail(ErrorKind::Singular, "the x-chart is singular at a branch point");
  const Eigen::Vector2cd v = c.data().v_x(p.x, c.y(p));
  const Eigen::Matrix2d yinv = c.tau().im_inverse();
  return (v.adjoint() * yinv.cast<cd>() * v).value().real();
}

CurvePoint random_curve_point(const CurveModel& c, std::mt19937_64& rng, double radius, double min_branch_distance) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const cd x(u(rng), u(rng));
    if (std::abs(x) > radius) continue;
    if (detail::distance_to_roots(c.branch_points(), x) < min_branch_distance) continue;
    return CurvePoint::finite(x, coin(rng) ? 1 : -1);
  }
  fail(ErrorKind::InvalidInput, "no admissible random point in the requested disk");
}

}  // namespace thetagreen
