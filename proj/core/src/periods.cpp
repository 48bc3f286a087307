#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "curve_internal.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen::detail {

std::vector<cd> quintic_roots(const std::array<cd, 6>& c) {
  Eigen::Matrix<cd, 5, 5> companion = Eigen::Matrix<cd, 5, 5>::Zero();
  for (int i = 1; i < 5; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 5; ++i) companion(i, 4) = -c[i];
  Eigen::ComplexEigenSolver<Eigen::Matrix<cd, 5, 5>> es(companion, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::NonConvergence, "root finder failed");
  std::vector<cd> roots(5);
  auto poly = [&](cd x, cd& deriv) {
    cd p = c[5];
    deriv = 0.0;
    for (int k = 4; k >= 0; --k) {
      deriv = deriv * x + p;
      p = p * x + c[k];
    }
    return p;
  };
  for (int i = 0; i < 5; ++i) {
    cd x = es.eigenvalues()(i);
    for (int it = 0; it < 4; ++it) {
      cd d;
      const cd p = poly(x, d);
      if (std::abs(d) == 0.0) break;
      const cd step = p / d;
      if (std::abs(step) > 1e-3 * (1.0 + std::abs(x))) break;  // do not jump between roots
      x -= step;
    }
    roots[i] = x;
  }
  return roots;
}

void sort_branch_points(std::vector<cd>& roots) {
  double scale = 1.0;
  for (cd r : roots) scale = std::max(scale, std::abs(r));
  const double tol = 1e-9 * scale;
  std::sort(roots.begin(), roots.end(), [tol](cd a, cd b) {
    if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

cd y_branch(const std::vector<cd>& roots, cd x) {
  cd y = 1.0;
  for (cd e : roots) y *= sqrt_p(x - e);
  return y;
}

cd continue_y(const std::vector<cd>& roots, cd x0, cd y0, cd x1) {
  cd y = y0;
  for (cd e : roots) y *= sqrt_p((x1 - e) / (x0 - e));
  return y;
}

double distance_to_roots(const std::vector<cd>& roots, cd x) {
  double d = std::numeric_limits<double>::infinity();
  for (cd e : roots) d = std::min(d, std::abs(x - e));
  return d;
}

namespace {

struct Ellipse {
  cd center, half;  // foci at center -+ half
  double a, b;      // semi-axes in units of |half|
};

Ellipse loop_ellipse(const std::vector<cd>& roots, int k, double fraction) {
  Ellipse el;
  el.center = 0.5 * (roots[k] + roots[k + 1]);
  el.half = 0.5 * (roots[k + 1] - roots[k]);
  double a_min = std::numeric_limits<double>::infinity();
  for (int m = 0; m < static_cast<int>(roots.size()); ++m) {
    if (m == k || m == k + 1) continue;
    const cd u = (roots[m] - el.center) / el.half;
    a_min = std::min(a_min, 0.5 * (std::abs(u - 1.0) + std::abs(u + 1.0)));
  }
  el.a = 1.0 + fraction * (a_min - 1.0);
  el.b = std::sqrt(el.a * el.a - 1.0);
  return el;
}

/// Trapezoid rule with n nodes around the ellipse; y continued node to node.
Eigen::Matrix<cd, 2, 1> ellipse_integral(const std::vector<cd>& roots, const Ellipse& el, int n, bool& ok) {
  const double h = 2.0 * kPi / n;
  Eigen::Matrix<cd, 2, 1> sum = Eigen::Matrix<cd, 2, 1>::Zero();
  cd x_prev = el.center + el.half * el.a;
  const cd y_start = sqrt_p([&] {
    cd f = 1.0;
    for (cd e : roots) f *= (x_prev - e);
    return f;
  }());
  cd y_prev = y_start;
  ok = true;
  for (int j = 0; j < n; ++j) {
    const double t = j * h;
    const cd x = el.center + el.half * cd(el.a * std::cos(t), el.b * std::sin(t));
    const cd dx = el.half * cd(-el.a * std::sin(t), el.b * std::cos(t));
    if (j > 0) {
      if (std::abs(x - x_prev) > 0.5 * distance_to_roots(roots, x_prev)) ok = false;
      y_prev = continue_y(roots, x_prev, y_prev, x);
      x_prev = x;
    }
    const cd w = dx / y_prev;
    sum(0) += w;
    sum(1) += x * w;
  }
  // the loop encircles two branch points, so y must return to its start value
  const cd x0 = el.center + el.half * el.a;
  const cd y_end = continue_y(roots, x_prev, y_prev, x0);
  if (std::abs(y_end - y_start) > 1e-8 * std::abs(y_start)) ok = false;
  return sum * h;
}

}  // namespace

LoopPeriods loop_periods(const std::vector<cd>& roots, double fraction, int min_nodes) {
  LoopPeriods out;
  out.values.setZero();
  int max_nodes = 0;
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Ellipse el = loop_ellipse(roots, k, fraction);
    int n = min_nodes;
    bool ok = false;
    Eigen::Matrix<cd, 2, 1> prev = ellipse_integral(roots, el, n, ok);
    while (!ok && n < (1 << 18)) {
      n *= 2;
      prev = ellipse_integral(roots, el, n, ok);
    }
    double change = std::numeric_limits<double>::infinity();
    while (n < (1 << 18)) {
      n *= 2;
      const Eigen::Matrix<cd, 2, 1> next = ellipse_integral(roots, el, n, ok);
      change = (next - prev).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
      prev = next;
      if (ok && change <= 1e-13) break;
    }
    if (!ok || change > 1e-9)
      fail(ErrorKind::NonConvergence, "period quadrature did not converge (relative change " +
                                          std::to_string(change) + ")");
    out.values.col(k) = prev;
    max_nodes = std::max(max_nodes, n);
    worst = std::max(worst, change);
  }
  out.nodes = max_nodes;
  out.last_change = worst;
  return out;
}

Homology symplectic_periods(const LoopPeriods& loops) {
  Homology best;
  best.asymmetry = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int signs = 0; signs < 8; ++signs) {
    Eigen::Matrix<int, 4, 4> K = Eigen::Matrix<int, 4, 4>::Zero();
    for (int k = 0; k < 3; ++k) {
      const int e = (signs >> k) & 1 ? -1 : 1;
      K(k, k + 1) = e;
      K(k + 1, k) = -e;
    }
    auto form = [&](const Eigen::Vector4i& a, const Eigen::Vector4i& b) { return a.dot(K * b); };
    const Eigen::Vector4i c1(1, 0, 0, 0), c2(0, 1, 0, 0), c3(0, 0, 1, 0), c4(0, 0, 0, 1);
    const Eigen::Vector4i a1 = c1;
    const Eigen::Vector4i b1 = K(0, 1) * c2;
    auto proj = [&](const Eigen::Vector4i& x) -> Eigen::Vector4i {
      return x - form(x, b1) * a1 + form(x, a1) * b1;
    };
    const Eigen::Vector4i a2 = proj(c3);
    const Eigen::Vector4i x4 = proj(c4);
    const int s = form(a2, x4);
    if (s != 1 && s != -1) continue;
    const Eigen::Vector4i b2 = s * x4;

    Eigen::Matrix<int, 4, 4> basis;
    basis.row(0) = a1.transpose();
    basis.row(1) = a2.transpose();
    basis.row(2) = b1.transpose();
    basis.row(3) = b2.transpose();
    const Eigen::Matrix<cd, 2, 4> cyc = loops.values * basis.transpose().cast<double>().cast<cd>();
    CMatrix pa = cyc.leftCols(2);
    CMatrix pb = cyc.rightCols(2);
    const Eigen::Matrix2cd pa2 = pa;
    Eigen::PartialPivLU<Eigen::Matrix2cd> lu(pa2);
    const CMatrix tau = lu.solve(Eigen::Matrix2cd(pb));
    const double scale = 1.0 + tau.cwiseAbs().maxCoeff();
    const double asym = (tau - tau.transpose()).cwiseAbs().maxCoeff() / scale;
    const Eigen::Matrix2d y = 0.5 * (tau.imag() + tau.imag().transpose());
    const bool positive = y(0, 0) > 0.0 && y.determinant() > 0.0;
    if (positive && asym < best.asymmetry) {
      best.period_a = pa;
      best.period_b = pb;
      best.basis = basis;
      best.asymmetry = asym;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::Inconsistent, "no homology basis satisfies the Riemann relations");
  return best;
}

}  // namespace thetagreen::detail
