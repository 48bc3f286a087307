#include <algorithm>
#include <cmath>
#include <limits>

#include "thetagreen/curve.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"

namespace thetagreen {

Estimate eta_invariant(const CurveModel& c, const QuadratureConfig& q) {
  if (c.tau().genus() != 2) fail(ErrorKind::Unsupported, "the eta integral is implemented for genus 2");
  const CVector kappa = c.riemann_constant();
  const PeriodMatrix& tau = c.tau();
  // log ||eta|| has logarithmic zeros exactly over the Weierstrass points.
  const NuIntegral r = integrate_nu(
      c, [&](const CurveSample& s) { return eta_unchecked(AbelianPoint{tau, s.aj - kappa}).log_eta_norm; }, q,
      c.weierstrass_points());
  return {r.value, r.error};
}

namespace {

class SweepPath {
 public:
  explicit SweepPath(const CurveModel& c) : roots_(c.branch_points()) {
    cd centre = 0.0;
    for (cd e : roots_) centre += e / 5.0;
    double spread = 0.0;
    for (cd e : roots_) spread = std::max(spread, std::abs(e - centre));
    reach_ = std::max(spread, 1.0);
    out_first_ = direction(roots_.front() - centre);
    out_last_ = direction(roots_.back() - centre);
  }

  /// Point at parameter u in [0, 6]. The end pieces reach infinity at
  /// u = 0 and u = 6 through x = e + d * reach * (1 - w) / w, w in (0, 1].
  CurvePoint at(double u) const {
    if (u <= 0.0 || u >= 6.0) return CurvePoint::infinity();
    if (u < 1.0) return CurvePoint::finite(roots_.front() + out_first_ * (reach_ * (1.0 - u) / u), 1);
    if (u > 5.0) {
      const double w = 6.0 - u;
      return CurvePoint::finite(roots_.back() + out_last_ * (reach_ * (1.0 - w) / w), 1);
    }
    const int k = std::min(3, static_cast<int>(std::floor(u - 1.0)));
    const double s = u - 1.0 - k;
    return CurvePoint::finite(roots_[k] + s * (roots_[k + 1] - roots_[k]), 1);
  }

 private:
  static cd direction(cd v) { return std::abs(v) > 1e-12 ? v / std::abs(v) : cd(-1.0, 0.0); }

  std::vector<cd> roots_;
  double reach_ = 1.0;
  cd out_first_{}, out_last_{};
};

}  // namespace

EtaSweep eta_zero_sweep(const CurveModel& c, int n_points, double zero_tol) {
  if (n_points < 60) fail(ErrorKind::InvalidInput, "sweep needs at least 60 points");
  const SweepPath path(c);
  const CVector kappa = c.riemann_constant();
  const PeriodMatrix& tau = c.tau();
  auto theta_point = [&](const CurvePoint& p) { return CVector(abel_jacobi_vector(c, p) - kappa); };
  auto log_eta = [&](double u) { return eta_unchecked(AbelianPoint{tau, theta_point(path.at(u))}).log_eta_norm; };

  // Shifted grid: no sample lands on a branch point, so every zero has to be
  // found by the refinement.
  EtaSweep out;
  for (int i = 0; i < n_points; ++i) {
    const double u = 6.0 * (i + 0.5 * (std::sqrt(5.0) - 1.0)) / n_points;
    out.parameter.push_back(u);
    out.log_eta_norm.push_back(log_eta(u));
  }
  std::vector<double> sorted = out.log_eta_norm;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  out.scale = std::exp(sorted[sorted.size() / 2]);

  std::vector<CVector> images;
  for (const CurvePoint& w : c.weierstrass_points()) images.push_back(theta_point(w));

  const double log_tol = std::log(zero_tol * out.scale);
  const int n = n_points;
  for (int i = 0; i < n; ++i) {
    // The path is closed through infinity, so neighbours wrap around.
    const double left = out.log_eta_norm[(i + n - 1) % n], mid = out.log_eta_norm[i],
                 right = out.log_eta_norm[(i + 1) % n];
    if (!(mid <= left && mid <= right)) continue;
    double a = out.parameter[i] - 6.0 / n, b = out.parameter[i] + 6.0 / n;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = log_eta(std::fmod(x1 + 6.0, 6.0)), f2 = log_eta(std::fmod(x2 + 6.0, 6.0));
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = log_eta(std::fmod(x1 + 6.0, 6.0));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = log_eta(std::fmod(x2 + 6.0, 6.0));
      }
    }
    const double u = std::fmod(0.5 * (a + b) + 6.0, 6.0);
    const double value = log_eta(u);
    if (!(value <= log_tol)) continue;
    EtaZero z;
    z.parameter = u;
    z.eta_norm = std::exp(value);
    z.distance_to_weierstrass = std::numeric_limits<double>::infinity();
    const CVector zp = theta_point(path.at(u));
    for (std::size_t k = 0; k < images.size(); ++k) {
      const double d = torus_distance(tau, zp, images[k]);
      if (d < z.distance_to_weierstrass) {
        z.distance_to_weierstrass = d;
        z.weierstrass_index = static_cast<int>(k);
      }
    }
    out.zeros.push_back(z);
  }
  return out;
}

}  // namespace thetagreen
