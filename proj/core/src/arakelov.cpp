#include "thetagreen/arakelov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "arakelov_internal.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"

namespace thetagreen {

namespace detail {

bool same_point(const CurveModel& c, const CurvePoint& a, const CurvePoint& b, double tol) {
  if (a.at_infinity || b.at_infinity) return a.at_infinity && b.at_infinity;
  if (std::abs(a.x - b.x) > tol * (1.0 + std::abs(a.x))) return false;
  return a.sheet == b.sheet || c.is_weierstrass(a, tol) || std::abs(c.y(a) - c.y(b)) <= 1e-8 * (1.0 + std::abs(c.y(a)));
}

double point_distance(const CurvePoint& a, const CurvePoint& b) {
  if (a.at_infinity || b.at_infinity) return (a.at_infinity && b.at_infinity) ? 0.0 : 1.0 / std::abs(a.at_infinity ? b.x : a.x);
  return std::abs(a.x - b.x);
}

double curve_scale(const CurveModel& c) {
  double s = 0.0;
  for (cd e : c.branch_points()) s = std::max(s, std::abs(e));
  return std::max(s, 1e-3);
}

double min_branch_separation(const CurveModel& c) {
  const auto& e = c.branch_points();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) m = std::min(m, std::abs(e[i] - e[j]));
  return m;
}

std::vector<CurvePoint> generic_points(const CurveModel& c, int count, std::mt19937_64& rng) {
  const double scale = curve_scale(c);
  const double gap = 0.1 * min_branch_separation(c);
  std::vector<CurvePoint> pts;
  for (int attempt = 0; static_cast<int>(pts.size()) < count; ++attempt) {
    if (attempt > 100000) fail(ErrorKind::NonConvergence, "could not place well separated generic points");
    const CurvePoint p = random_curve_point(c, rng, 1.2 * scale, gap);
    bool ok = true;
    // Points and their conjugates must stay apart: P2 = sigma(P1) makes P1 + P2 canonical.
    for (const CurvePoint& q : pts) ok = ok && point_distance(p, q) >= gap;
    if (ok) pts.push_back(p);
  }
  return pts;
}

CurvePoint near_point(const CurveModel& c, const CurvePoint& p, cd x) { return c.point_with_y(x, c.y(p)); }

std::array<CurvePoint, 2> auxiliary_pair(const CurveModel& c) {
  std::mt19937_64 rng(0x5a5a17ULL);
  const auto pts = generic_points(c, 2, rng);
  return {pts[0], pts[1]};
}

}  // namespace detail

using detail::same_point;

namespace {

constexpr double kThetaEps = 1e-12;

CVector aj(const CurveModel& c, const CurvePoint& p) { return abel_jacobi_vector(c, p); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CurvePoint sample_point(const CurveModel& c, const CurveSample& s) {
  if (s.at_infinity) return CurvePoint::infinity();
  return c.point_with_y(s.x, s.y);
}

}  // namespace

// ---------------------------------------------------------------------------
// Faltings route

double faltings_log_theta(const CurveModel& c, const CurvePoint& p, const CurvePoint& q) {
  return c.theta().log_norm(2.0 * aj(c, p) - aj(c, q) - c.riemann_constant(), kThetaEps);
}

FaltingsGreen::FaltingsGreen(CurveModel c, QuadratureConfig q) : curve_(std::move(c)), quad_(q) { quad_.validate(); }

NuIntegral FaltingsGreen::normaliser(const CurvePoint& p) const {
  const auto key = std::make_tuple(p.at_infinity ? 0.0 : p.x.real(), p.at_infinity ? 0.0 : p.x.imag(),
                                   p.at_infinity ? 0 : p.sheet, p.at_infinity);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const CVector shift = 2.0 * aj(curve_, p) - curve_.riemann_constant();
  const ThetaFunction& th = curve_.theta();
  NuIntegral m = integrate_nu(
      curve_, [&](const CurveSample& s) { return th.log_norm(shift - s.aj, kThetaEps); }, quad_, {p});
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, m);
  return m;
}

double FaltingsGreen::log_green(const CurvePoint& p, const CurvePoint& q) const {
  if (same_point(curve_, p, q, 1e-14)) return -std::numeric_limits<double>::infinity();
  return 0.5 * (faltings_log_theta(curve_, p, q) - normaliser(p).value);
}

// ---------------------------------------------------------------------------
// Bost's constant

namespace {

NuIntegral theta_translate_integral(const CurveModel& c, const QuadratureConfig& q, const CurvePoint& r,
                                    const CurvePoint& s, bool refine_at_s) {
  const CVector shift = aj(c, r) - aj(c, s) - c.riemann_constant();
  const ThetaFunction& th = c.theta();
  std::vector<CurvePoint> singular{involution(r)};
  if (refine_at_s) singular.push_back(s);
  return integrate_nu(
      c, [&](const CurveSample& x) { return th.log_norm(x.aj + shift, kThetaEps); }, q, singular);
}

/// int_Q I(P,Q) nu(Q) by sampling Q from nu, with (1/2) L(P,Q) as control
/// variate: I - L/2 is constant in Q, and int L(P,.) nu = M(P) is a single integral.
Estimate mean_translate_integral(const CurveModel& c, const QuadratureConfig& q, const FaltingsGreen& faltings,
                                 const CurvePoint& p, int samples, std::uint64_t stream) {
  if (samples < 2) fail(ErrorKind::InvalidInput, "need at least two outer samples");
  const std::vector<WeightedSample> nodes = quadrature_nodes(c, q, 0);
  std::vector<double> weights(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) weights[i] = std::abs(nodes[i].weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::mt19937_64 rng(mix(q.seed, stream));
  const double gap = 0.05 * detail::min_branch_separation(c);

  std::vector<double> d;
  double quad_err = 0.0;
  while (static_cast<int>(d.size()) < samples) {
    const CurvePoint qp = sample_point(c, nodes[pick(rng)].sample);
    // Q = P is a removable singularity of the difference but not of its two
    // terms separately.
    if (detail::point_distance(p, qp) < gap) continue;
    const NuIntegral in = theta_translate_integral(c, q, p, qp, true);
    d.push_back(in.value - 0.5 * faltings_log_theta(c, p, qp));
    quad_err += in.error / samples;
  }
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / samples;
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= (samples - 1);
  const NuIntegral m = faltings.normaliser(p);
  return {mean + 0.5 * m.value, std::sqrt(var / samples + quad_err * quad_err + 0.25 * m.error * m.error)};
}

}  // namespace

BostConstant bost_constant_estimate(const CurveModel& c, const QuadratureConfig& q, int outer_samples) {
  q.validate();
  std::mt19937_64 base_rng(0x426f7374ULL);
  const std::vector<CurvePoint> bases = detail::generic_points(c, 2, base_rng);
  FaltingsGreen faltings(c, q);
  BostConstant out;
  out.outer_samples = outer_samples;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const Estimate m = mean_translate_integral(c, q, faltings, bases[b], outer_samples, b);
    out.per_point.push_back({-m.value, m.error});
  }
  const Estimate& a1 = out.per_point[0];
  const Estimate& a2 = out.per_point[1];
  const double combined = std::hypot(a1.error, a2.error);
  if (std::abs(a1.value - a2.value) > 3.0 * combined) {
    std::ostringstream os;
    os << "Bost constant depends on the base point: " << a1.value << " vs " << a2.value << " (combined error "
       << combined << ")";
    fail(ErrorKind::Inconsistent, os.str());
  }
  out.value = 0.5 * (a1.value + a2.value);
  out.error = 0.5 * combined;
  return out;
}

double bost_constant(const CurveModel& c, const QuadratureConfig& q) { return bost_constant_estimate(c, q).value; }

Estimate bost_constant_crosscheck(const CurveModel& c, const QuadratureConfig& q, const CurvePoint& r,
                                  const CurvePoint& s) {
  if (same_point(c, r, s, 1e-10)) fail(ErrorKind::InvalidInput, "auxiliary points must be distinct");
  FaltingsGreen fg(c, q);
  const NuIntegral mr = fg.normaliser(r);
  const NuIntegral ms = fg.normaliser(s);
  const double log_g_rs = fg.log_green(r, s);
  const ThetaFunction& th = c.theta();
  const CVector kappa = c.riemann_constant();
  const CVector ar = aj(c, r), as = aj(c, s);
  const CVector numerator_shift = ar - as - kappa;

  // log ||Lambda||(D) with G(D,S) = G(S,D) and G(sigma D, R) = G(R, sigma D),
  // both normalised in their second argument.
  auto integrand = [&](const CurveSample& x) {
    const double num = th.log_norm(x.aj + numerator_shift, kThetaEps);
    const double g_sd = 0.5 * (th.log_norm(2.0 * as - x.aj - kappa, kThetaEps) - ms.value);
    const double g_r_sigma_d = 0.5 * (th.log_norm(2.0 * ar + x.aj - kappa, kThetaEps) - mr.value);
    return num - log_g_rs - g_sd - g_r_sigma_d;
  };
  const NuIntegral lam = integrate_nu(c, integrand, q, {s, involution(r)});
  return {-lam.value, std::sqrt(lam.error * lam.error + 0.25 * (mr.error * mr.error + ms.error * ms.error))};
}

// ---------------------------------------------------------------------------
// Green's function

GreenEvaluator::GreenEvaluator(CurveModel c, QuadratureConfig q) : curve_(std::move(c)), quad_(q) {
  quad_.validate();
  const BostConstant a = bost_constant_estimate(curve_, quad_);
  bost_A_ = {a.value, a.error};
}

GreenEvaluator::GreenEvaluator(CurveModel c, QuadratureConfig q, Estimate bost_A)
    : curve_(std::move(c)), quad_(q), bost_A_(bost_A) {
  quad_.validate();
  if (!std::isfinite(bost_A_.value)) fail(ErrorKind::InvalidInput, "Bost constant must be finite");
}

NuIntegral GreenEvaluator::bost_integral(const CurvePoint& r, const CurvePoint& s, bool refine_at_s) const {
  return theta_translate_integral(curve_, quad_, r, s, refine_at_s);
}

Estimate GreenEvaluator::log_green_estimate(const CurvePoint& r, const CurvePoint& s) const {
  if (same_point(curve_, r, s, 1e-14)) return {-std::numeric_limits<double>::infinity(), 0.0};
  const NuIntegral i = bost_integral(r, s);
  return {i.value + bost_A_.value, std::hypot(i.error, bost_A_.error)};
}

double GreenEvaluator::log_green(const CurvePoint& r, const CurvePoint& s) const {
  return log_green_estimate(r, s).value;
}

Estimate mean_log_green(const GreenEvaluator& ge, const CurvePoint& p, int samples) {
  FaltingsGreen faltings(ge.curve(), ge.quadrature());
  const Estimate m = mean_translate_integral(ge.curve(), ge.quadrature(), faltings, p, samples, 0x6e6f726dULL);
  return {m.value + ge.bost_A(), std::hypot(m.error, ge.bost_A_error())};
}

double laplacian_log_green(const GreenEvaluator& ge, const CurvePoint& p, const CurvePoint& q, double h) {
  const CurveModel& c = ge.curve();
  if (q.at_infinity || c.is_weierstrass(q, 1e-10)) fail(ErrorKind::Domain, "stencil needs a finite non-branch point");
  if (detail::distance_to_roots(c.branch_points(), q.x) < 10.0 * h || detail::point_distance(p, q) < 10.0 * h)
    fail(ErrorKind::Domain, "stencil too close to a singular point");
  QuadratureConfig fine = ge.quadrature();
  fine.refinement_levels += 1;
  const cd y = c.y(q);
  auto at = [&](cd dx) {
    return theta_translate_integral(c, fine, p, c.point_with_y(q.x + dx, y), true).value;
  };
  return (at(h) + at(-h) + at(cd(0.0, h)) + at(cd(0.0, -h)) - 4.0 * at(0.0)) / (h * h);
}

double green(const GreenEvaluator& ge, const CurvePoint& r, const CurvePoint& s) {
  if (same_point(ge.curve(), r, s, 1e-14)) return 0.0;
  return std::exp(ge.log_green(r, s));
}

double log_green_divisor(const GreenEvaluator& ge, const DivisorOnCurve& d1, const DivisorOnCurve& d2) {
  double sum = 0.0;
  for (const CurvePoint& p : d1.points)
    for (const CurvePoint& q : d2.points) {
      if (same_point(ge.curve(), p, q, 1e-10)) return -std::numeric_limits<double>::infinity();
      sum += ge.log_green(p, q);
    }
  return sum;
}

double green_divisor(const GreenEvaluator& ge, const DivisorOnCurve& d1, const DivisorOnCurve& d2) {
  return std::exp(log_green_divisor(ge, d1, d2));
}

// ---------------------------------------------------------------------------
// Arakelov metric

ArakelovMetric::ArakelovMetric(const GreenEvaluator& ge, int extrapolation_steps, double initial_step)
    : ge_(ge), steps_(extrapolation_steps), h0_(initial_step) {
  if (steps_ < 3) fail(ErrorKind::InvalidInput, "extrapolation needs at least three steps");
  if (!(h0_ > 0.0)) fail(ErrorKind::InvalidInput, "initial step must be positive");
}

Estimate ArakelovMetric::log_dz_norm(const CurvePoint& p, LocalChart chart) const {
  const CurveModel& c = ge_.curve();
  if (p.at_infinity) fail(ErrorKind::Domain, "neither x nor 1/x is a coordinate at infinity");
  if (c.is_weierstrass(p, 1e-10)) fail(ErrorKind::Singular, "x is not a local coordinate at a branch point");
  if (chart == LocalChart::InverseX && std::abs(p.x) < 1e-8) fail(ErrorKind::Domain, "1/x chart excludes x = 0");

  // Stay well inside the disk where the chart coordinate is single valued.
  const double dist = detail::distance_to_roots(c.branch_points(), p.x);
  const cd z0 = chart == LocalChart::X ? p.x : 1.0 / p.x;
  const double reach = chart == LocalChart::X ? dist : dist / (std::abs(p.x) * (std::abs(p.x) + dist));
  const double h = std::min(h0_, 0.05 * reach);

  std::vector<std::vector<double>> t(steps_, std::vector<double>(steps_, 0.0));
  double noise = 0.0;  // relative quadrature error of the ratios
  for (int k = 0; k < steps_; ++k) {
    const double hk = std::ldexp(h, -k);
    const cd z = z0 + hk;
    const CurvePoint q = detail::near_point(c, p, chart == LocalChart::X ? z : 1.0 / z);
    const NuIntegral in = ge_.bost_integral(p, q);
    noise = std::max(noise, in.error);
    t[k][0] = hk / std::exp(in.value + ge_.bost_A());
    for (int j = 1; j <= k; ++j) t[k][j] = t[k][j - 1] + (t[k][j - 1] - t[k - 1][j - 1]) / (std::ldexp(1.0, j) - 1.0);
  }
  const int n = steps_ - 1;
  const double value = t[n][n];
  const double last = std::abs(t[n][n] - t[n][n - 1]);
  const double prev = std::abs(t[n - 1][n - 1] - t[n - 1][n - 2]);
  if (!(value > 0.0) || !std::isfinite(value)) fail(ErrorKind::NonConvergence, "Arakelov norm extrapolation failed");
  // Once the differences reach the quadrature noise their order is random.
  if (last > prev && last > std::max(1e-6, 10.0 * noise) * value) {
    std::ostringstream os;
    os << "Arakelov norm extrapolation is not settling (" << prev << " then " << last << ")";
    fail(ErrorKind::NonConvergence, os.str());
  }
  return {std::log(value), std::max(last / value, noise)};
}

double ArakelovMetric::dz_norm(const CurvePoint& p, LocalChart chart) const {
  return std::exp(log_dz_norm(p, chart).value);
}

double arakelov_dz_norm(const ArakelovMetric& m, const CurvePoint& p) { return m.dz_norm(p); }

double log_det_omega_norm(const ArakelovMetric& m, const CurvePoint& p1, const CurvePoint& p2) {
  const CurveModel& c = m.green().curve();
  const CVector a = ortho_differentials_x(c, p1);
  const CVector b = ortho_differentials_x(c, p2);
  const cd det = a(0) * b(1) - a(1) * b(0);
  return std::log(std::abs(det)) + m.log_dz_norm(p1).value + m.log_dz_norm(p2).value;
}

// ---------------------------------------------------------------------------
// delta

double delta_from_tuple(const ArakelovMetric& m, const CurvePoint& p1, const CurvePoint& p2, const CurvePoint& q) {
  const GreenEvaluator& ge = m.green();
  const CurveModel& c = ge.curve();
  const double log_theta =
      c.theta().log_norm(aj(c, p1) + aj(c, p2) - aj(c, q) - c.riemann_constant(), kThetaEps);
  const double bracket = log_theta - log_det_omega_norm(m, p1, p2) + ge.log_green(p1, p2) - ge.log_green(p1, q) -
                         ge.log_green(p2, q);
  return -8.0 * bracket;
}

DeltaResult delta(const CurveModel& c, const GreenEvaluator& ge, int n_tuples) {
  if (n_tuples < 3) fail(ErrorKind::InvalidInput, "delta needs at least three tuples");
  ArakelovMetric metric(ge);
  std::mt19937_64 rng(mix(ge.quadrature().seed, 0xde17a));
  DeltaResult out;
  for (int t = 0; t < n_tuples; ++t) {
    std::vector<CurvePoint> pts;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100) fail(ErrorKind::NonConvergence, "no admissible tuple for delta");
      pts = detail::generic_points(c, 3, rng);
      bool ok = true;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) ok = ok && detail::point_distance(pts[i], involution(pts[j])) >= 1e-3;
      if (ok) break;
    }
    out.estimates.push_back(delta_from_tuple(metric, pts[0], pts[1], pts[2]));
  }
  out.delta = std::accumulate(out.estimates.begin(), out.estimates.end(), 0.0) / n_tuples;
  for (double e : out.estimates) out.spread = std::max(out.spread, std::abs(e - out.delta));
  return out;
}

// ---------------------------------------------------------------------------
// Lambda and the identities

double log_lambda_norm(const GreenEvaluator& ge, const DivisorOnCurve& d, const CurvePoint& r, const CurvePoint& s) {
  const CurveModel& c = ge.curve();
  if (d.degree() != 1) fail(ErrorKind::InvalidInput, "Lambda takes a divisor of degree g - 1 = 1");
  const CurvePoint& p = d.points[0];
  const double num = c.theta().log_norm(aj(c, p) + aj(c, r) - aj(c, s) - c.riemann_constant(), kThetaEps);
  return num - ge.log_green(r, s) - ge.log_green(p, s) - ge.log_green(involution(p), r);
}

double lambda_norm(const CurveModel& c, const GreenEvaluator& ge, const DivisorOnCurve& d, const CurvePoint& r,
                   const CurvePoint& s) {
  if (d.degree() != 1) fail(ErrorKind::InvalidInput, "Lambda takes a divisor of degree g - 1 = 1");
  constexpr double kFloor = 1e-8;
  const double log_floor = std::log(kFloor);
  auto admissible = [&](const CurvePoint& a, const CurvePoint& b) {
    const CurvePoint& p = d.points[0];
    if (same_point(c, a, b, 1e-10)) return false;
    const double num = c.theta().log_norm(aj(c, p) + aj(c, a) - aj(c, b) - c.riemann_constant(), kThetaEps);
    // Cheap proxies for the Green factors: each vanishes where two points meet.
    const double sep = std::min({detail::point_distance(a, b), detail::point_distance(p, b),
                                 detail::point_distance(involution(p), a)});
    return num > log_floor && sep > kFloor;
  };
  CurvePoint a = r, b = s;
  std::mt19937_64 rng(mix(ge.quadrature().seed, 0x1a3bda));
  for (int attempt = 0; !admissible(a, b); ++attempt) {
    if (attempt >= 20) fail(ErrorKind::Domain, "degenerate divisor: every auxiliary pair meets a zero locus");
    const auto pts = detail::generic_points(c, 2, rng);
    a = pts[0];
    b = pts[1];
  }
  return std::exp(log_lambda_norm(ge, d, a, b));
}

double distance_to_ramification(const CurveModel& c, const DivisorOnCurve& d) {
  const AbelianPoint z = divisor_to_theta_point(c, d);
  double best = std::numeric_limits<double>::infinity();
  for (const CurvePoint& w : c.weierstrass_points()) {
    const AbelianPoint zw = divisor_to_theta_point(c, DivisorOnCurve{{w}});
    best = std::min(best, torus_distance(c.tau(), z.z, zw.z));
  }
  return best;
}

CurveInvariants compute_invariants(const CurveModel& c, const GreenEvaluator& ge, int n_tuples) {
  CurveInvariants inv;
  const DeltaResult d = delta(c, ge, n_tuples);
  inv.delta = d.delta;
  inv.delta_spread = d.spread;
  inv.delta_error = n_tuples > 1 ? d.spread / std::sqrt(static_cast<double>(n_tuples)) : 0.0;
  inv.bost_A = ge.bost_A();
  inv.bost_A_error = ge.bost_A_error();
  const auto aux = detail::auxiliary_pair(c);
  const Estimate cross = bost_constant_crosscheck(c, ge.quadrature(), aux[0], aux[1]);
  inv.bost_A_crosscheck = cross.value;
  inv.bost_A_crosscheck_error = cross.error;
  const Estimate eta_int = eta_invariant(c, ge.quadrature());
  inv.eta_integral = eta_int.value;
  inv.eta_integral_error = eta_int.error;
  return inv;
}

namespace {

void require_admissible(const CurveModel& c, const DivisorOnCurve& d) {
  if (d.degree() != 1) fail(ErrorKind::InvalidInput, "the identity takes a divisor of degree g - 1 = 1");
  const double dist = distance_to_ramification(c, d);
  if (dist < 1e-2) {
    std::ostringstream os;
    os << "excluded point: divisor lies within " << dist << " of the ramification locus";
    fail(ErrorKind::Domain, os.str());
  }
}

}  // namespace

double verify_main_theorem(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                           const DivisorOnCurve& d, const CurvePoint& r, const CurvePoint& s) {
  require_admissible(c, d);
  const double log_eta = eta(divisor_to_theta_point(c, d)).log_eta_norm;
  const double log_lambda = std::log(lambda_norm(c, ge, d, r, s));
  const double log_g = log_green_divisor(ge, d, involution(d));
  return log_eta - (-inv.delta / 4.0 + log_lambda + log_g);
}

double verify_main_theorem(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                           const DivisorOnCurve& d) {
  const auto aux = detail::auxiliary_pair(c);
  return verify_main_theorem(c, ge, inv, d, aux[0], aux[1]);
}

double verify_wronskian_lemma(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                              const CurvePoint& p, LocalChart chart) {
  if (p.at_infinity || c.is_weierstrass(p, 1e-10)) fail(ErrorKind::Domain, "excluded point: Weierstrass point");
  ArakelovMetric metric(ge);
  const double log_wr = log_wronskian_norm(metric, p, chart);
  if (log_wr < std::log(1e-8)) fail(ErrorKind::Domain, "excluded point: Wronskian norm below 1e-8");
  const double log_eta = eta(divisor_to_theta_point(c, DivisorOnCurve{{p}})).log_eta_norm;
  return log_eta - (-3.0 * inv.delta / 8.0 + log_wr);
}

}  // namespace thetagreen
