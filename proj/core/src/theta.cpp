#include "thetagreen/theta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "thetagreen/errors.hpp"

namespace thetagreen {

namespace {

constexpr double kMinEps = 1e-13;
constexpr double kRadiusStep = 0.05;
constexpr double kRadiusMax = 13.0;

/// Compensated complex accumulator.
struct KahanSum {
  double re = 0.0, re_c = 0.0, im = 0.0, im_c = 0.0;

  void add(cd v) {
    const double yr = v.real() - re_c;
    const double tr = re + yr;
    re_c = (tr - re) - yr;
    re = tr;
    const double yi = v.imag() - im_c;
    const double ti = im + yi;
    im_c = (ti - im) - yi;
    im = ti;
  }
  cd get() const { return {re, im}; }
};

/// int_a^inf t^m e^{-pi t^2} dt for a >= 0.
double gauss_moment_tail(int m, double a) {
  const double s = 0.5 * (m + 1);
  return 0.5 * std::pow(kPi, -s) * boost::math::tgamma(s, kPi * a * a);
}

/// Coefficients of (t + p)^a (t + q)^b in powers of t.
std::vector<double> shifted_product(int a, double p, int b, double q) {
  std::vector<double> pa(a + 1), qb(b + 1), out(a + b + 1, 0.0);
  for (int i = 0; i <= a; ++i) pa[i] = boost::math::binomial_coefficient<double>(a, i) * std::pow(p, a - i);
  for (int i = 0; i <= b; ++i) qb[i] = boost::math::binomial_coefficient<double>(b, i) * std::pow(q, b - i);
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j <= b; ++j) out[i + j] += pa[i] * qb[j];
  return out;
}

double component_bound(double t0, double t1, double t2, double rho, double c, JetOrder order) {
  double b = t0;
  if (order >= JetOrder::Gradient) b = std::max(b, 2.0 * kPi * (t1 / rho + c * t0));
  if (order >= JetOrder::Hessian)
    b = std::max(b, 4.0 * kPi * kPi * (t2 / (rho * rho) + 2.0 * c * t1 / rho + c * c * t0));
  return b;
}

double radical_inverse(int index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

std::vector<double> halton_point(int index, int dim) {
  static constexpr std::array<int, 6> primes{2, 3, 5, 7, 11, 13};
  if (dim < 1 || dim > 6) fail(ErrorKind::InvalidInput, "halton dimension must be 1..6");
  std::vector<double> out(dim);
  for (int k = 0; k < dim; ++k) out[k] = radical_inverse(index, primes[k]);
  return out;
}

ThetaFunction::ThetaFunction(PeriodMatrix tau) : tau_(std::move(tau)) {
  const int g = tau_.genus();
  rho_ = std::sqrt(tau_.im_min_eigenvalue());
  // Packing argument: balls of radius rho/2 around the points T(n + c) are disjoint,
  // which turns the lattice tail into a radial Gaussian integral.
  const double ball = std::pow(kPi, 0.5 * g) * std::pow(0.5 * rho_, g) / std::tgamma(0.5 * g + 1.0);
  const double sphere = 2.0 * std::pow(kPi, 0.5 * g) / std::tgamma(0.5 * g);
  const double pref = sphere / ball;
  std::array<std::vector<double>, 3> poly;
  for (int k = 0; k < 3; ++k) poly[k] = shifted_product(g - 1, 0.5 * rho_, k, rho_);
  for (double r = rho_; r <= std::max(kRadiusMax, rho_ + 1.0); r += kRadiusStep) {
    const double a = r - rho_;
    std::array<double, 3> t{};
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < poly[k].size(); ++m) s += poly[k][m] * gauss_moment_tail(static_cast<int>(m), a);
      t[k] = pref * s;
    }
    table_.push_back({r, t[0], t[1], t[2]});
  }
}

double ThetaFunction::tail_bound(double radius, JetOrder order, double c_norm) const {
  // Use the largest tabulated radius not exceeding `radius` (bounds decrease in R).
  auto it = std::upper_bound(table_.begin(), table_.end(), radius,
                             [](double r, const TailRow& row) { return r < row.radius; });
  if (it == table_.begin()) return std::numeric_limits<double>::infinity();
  --it;
  return component_bound(it->t0, it->t1, it->t2, rho_, c_norm, order);
}

double ThetaFunction::radius_for(double target, JetOrder order, double c_norm) const {
  auto it = std::partition_point(table_.begin(), table_.end(), [&](const TailRow& row) {
    return component_bound(row.t0, row.t1, row.t2, rho_, c_norm, order) > target;
  });
  if (it == table_.end())
    fail(ErrorKind::Precision, "requested theta tolerance is not reachable in double precision");
  return it->radius;
}

ThetaJet ThetaFunction::jet(const CVector& z, double eps, JetOrder order) const {
  if (!(eps >= kMinEps)) fail(ErrorKind::Precision, "theta tolerance below 1e-13 is not supported");
  if (z.size() != genus()) fail(ErrorKind::InvalidInput, "point dimension does not match genus");
  const RVector y = z.imag();
  const RVector c = tau_.im_inverse() * y;
  const double log_scale = kPi * y.dot(c);
  const double target = eps * std::exp(-log_scale);
  return jet_with_radius(z, radius_for(target, order, c.norm()), order);
}

ThetaJet ThetaFunction::jet_with_radius(const CVector& z, double radius, JetOrder order) const {
  const int g = genus();
  if (z.size() != g) fail(ErrorKind::InvalidInput, "point dimension does not match genus");
  for (int i = 0; i < g; ++i)
    if (!std::isfinite(z(i).real()) || !std::isfinite(z(i).imag()))
      fail(ErrorKind::InvalidInput, "non-finite theta argument");

  const RVector x = z.real();
  const RVector y = z.imag();
  const RVector c = tau_.im_inverse() * y;
  const RMatrix& T = tau_.im_cholesky();
  const RMatrix X = tau_.re();
  const double r2 = radius * radius;

  KahanSum s0;
  std::array<KahanSum, kMaxGenus> s1;
  std::array<KahanSum, kMaxGenus * kMaxGenus> s2;
  const bool want1 = order >= JetOrder::Gradient;
  const bool want2 = order >= JetOrder::Hessian;

  std::array<std::int64_t, kMaxGenus> n{};

  // Fincke-Pohst style enumeration of the ellipsoid |T(n + c)| <= radius,
  // fixing the last coordinate first (T is upper triangular).
  auto visit = [&](auto&& self, int level, double used) -> void {
    double shift = 0.0;
    for (int j = level + 1; j < g; ++j) shift += T(level, j) * (static_cast<double>(n[j]) + c(j));
    const double room = r2 - used;
    if (room < 0.0) return;
    const double w = std::sqrt(room);
    const double tii = T(level, level);
    const auto lo = static_cast<std::int64_t>(std::ceil((-w - shift) / tii - c(level)));
    const auto hi = static_cast<std::int64_t>(std::floor((w - shift) / tii - c(level)));
    for (std::int64_t k = lo; k <= hi; ++k) {
      n[level] = k;
      const double row = tii * (static_cast<double>(k) + c(level)) + shift;
      const double now = used + row * row;
      if (now > r2) continue;
      if (level > 0) {
        self(self, level - 1, now);
        continue;
      }
      double phase = 0.0;
      for (int a = 0; a < g; ++a) {
        const double na = static_cast<double>(n[a]);
        double xa = 2.0 * x(a);
        for (int b = 0; b < g; ++b) xa += X(a, b) * static_cast<double>(n[b]);
        phase += na * xa;
      }
      const cd term = std::polar(std::exp(-kPi * now), kPi * phase);
      s0.add(term);
      if (want1) {
        for (int a = 0; a < g; ++a) {
          const cd ta = term * static_cast<double>(n[a]);
          s1[a].add(ta);
          if (want2)
            for (int b = a; b < g; ++b) s2[a * kMaxGenus + b].add(ta * static_cast<double>(n[b]));
        }
      }
    }
  };
  visit(visit, g - 1, 0.0);

  ThetaJet out;
  out.order = order;
  out.radius = radius;
  out.log_scale = kPi * y.dot(c);
  out.scaled_value = s0.get();
  out.scaled_grad = CVector::Zero(g);
  out.scaled_hess = CMatrix::Zero(g, g);
  const cd two_pi_i(0.0, 2.0 * kPi);
  if (want1)
    for (int a = 0; a < g; ++a) out.scaled_grad(a) = two_pi_i * s1[a].get();
  if (want2)
    for (int a = 0; a < g; ++a)
      for (int b = a; b < g; ++b) {
        const cd v = -4.0 * kPi * kPi * s2[a * kMaxGenus + b].get();
        out.scaled_hess(a, b) = v;
        out.scaled_hess(b, a) = v;
      }
  out.scaled_err_bound = tail_bound(radius, order, c.norm());
  const double factor = std::exp(out.log_scale);
  out.value = factor * out.scaled_value;
  out.grad = factor * out.scaled_grad;
  out.hess = factor * out.scaled_hess;
  out.err_bound = factor * out.scaled_err_bound;
  return out;
}

double ThetaFunction::norm(const CVector& z, double eps) const {
  const CVector w = reduce_modulo_lattice(tau_, z).z;
  const ThetaJet j = jet(w, eps, JetOrder::Value);
  return std::pow(tau_.im_det(), 0.25) * std::abs(j.scaled_value);
}

double ThetaFunction::log_norm(const CVector& z, double eps) const {
  const CVector w = reduce_modulo_lattice(tau_, z).z;
  const ThetaJet j = jet(w, eps, JetOrder::Value);
  return 0.25 * std::log(tau_.im_det()) + std::log(std::abs(j.scaled_value));
}

double ThetaFunction::divisor_scale() const {
  std::call_once(scale_once_, [this] {
    const int g = genus();
    std::vector<double> values;
    values.reserve(100);
    for (int i = 1; i <= 100; ++i) {
      const std::vector<double> h = halton_point(i, 2 * g);
      CVector z(g);
      RVector a(g), b(g);
      for (int k = 0; k < g; ++k) a(k) = h[k], b(k) = h[g + k];
      z = a.cast<cd>() + tau_.tau() * b.cast<cd>();
      values.push_back(norm(z));
    }
    std::nth_element(values.begin(), values.begin() + 50, values.end());
    const double upper = values[50];
    std::nth_element(values.begin(), values.begin() + 49, values.begin() + 50);
    scale_ = 0.5 * (values[49] + upper);
  });
  return scale_;
}

bool ThetaFunction::on_divisor(const CVector& z, double tol) const {
  return norm(z) <= tol * divisor_scale();
}

std::shared_ptr<const ThetaFunction> theta_function(const PeriodMatrix& tau) {
  static std::mutex mutex;
  static std::map<std::vector<double>, std::shared_ptr<const ThetaFunction>> cache;
  std::vector<double> key;
  key.reserve(2 * tau.tau().size());
  for (Eigen::Index i = 0; i < tau.tau().size(); ++i) {
    key.push_back(tau.tau()(i).real());
    key.push_back(tau.tau()(i).imag());
  }
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() >= 256) cache.clear();
  auto f = std::make_shared<const ThetaFunction>(tau);
  cache.emplace(std::move(key), f);
  return f;
}

ThetaJet theta_jet(const AbelianPoint& p, double eps, JetOrder order) {
  return theta_function(p.tau)->jet(p.z, eps, order);
}

double theta_norm(const AbelianPoint& p, double eps) { return theta_function(p.tau)->norm(p.z, eps); }

bool on_theta_divisor(const AbelianPoint& p, double tol) {
  return theta_function(p.tau)->on_divisor(p.z, tol);
}

}  // namespace thetagreen
