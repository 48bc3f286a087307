#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "thetagreen/curve.hpp"

namespace thetagreen {

/// log ||theta||(2 AJ(P) - AJ(Q) - kappa). As a function of Q it equals
/// 2 log G(P,Q) up to a constant depending on P.
double faltings_log_theta(const CurveModel& c, const CurvePoint& p, const CurvePoint& q);

/// Green's function obtained from the Faltings relation with P1 = P2 = P:
///   log G(P,Q) = (L(P,Q) - M(P)) / 2,  L = faltings_log_theta,  M(P) = int L(P,.) nu.
/// Used as an independent route to G for cross-checks and as a control
/// variate. The normalisers M(P) are cached per point.
class FaltingsGreen {
 public:
  FaltingsGreen(CurveModel c, QuadratureConfig q);

  const CurveModel& curve() const { return curve_; }
  NuIntegral normaliser(const CurvePoint& p) const;
  double log_green(const CurvePoint& p, const CurvePoint& q) const;

 private:
  CurveModel curve_;
  QuadratureConfig quad_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<double, double, int, bool>, NuIntegral> cache_;
};

/// Bost's constant with its standard error and the per-base-point estimates.
struct BostConstant {
  double value = 0.0;
  double error = 0.0;
  std::vector<Estimate> per_point;  // one entry per base point P
  int outer_samples = 0;
};

/// A = -int_Q I(P,Q) nu(Q), I the Theta-translate integral, for two base
/// points P. The outer average samples Q from nu (driven by q.seed) and uses
/// (1/2) faltings_log_theta(P,Q) as a control variate. Throws Inconsistent when
/// the two base points disagree by more than three combined standard errors.
BostConstant bost_constant_estimate(const CurveModel& c, const QuadratureConfig& q, int outer_samples = 8);
double bost_constant(const CurveModel& c, const QuadratureConfig& q);

/// A = -int_X log ||Lambda||(D) nu(D) with every Green's function taken from
/// the Faltings route. (r, s) are the auxiliary points of ||Lambda||.
Estimate bost_constant_crosscheck(const CurveModel& c, const QuadratureConfig& q, const CurvePoint& r,
                                  const CurvePoint& s);

/// Canonical Green's function through Bost's formula
///   log G(R,S) = int_X log ||theta||(AJ(x) - kappa + AJ(R) - AJ(S)) nu(x) + A.
class GreenEvaluator {
 public:
  /// Computes A with bost_constant_estimate.
  GreenEvaluator(CurveModel c, QuadratureConfig q);
  GreenEvaluator(CurveModel c, QuadratureConfig q, Estimate bost_A);

  const CurveModel& curve() const { return curve_; }
  const QuadratureConfig& quadrature() const { return quad_; }
  double bost_A() const { return bost_A_.value; }
  double bost_A_error() const { return bost_A_.error; }

  /// The Theta-translate integral I(R,S). With refine_at_s = false the rule is
  /// not graded towards S. It then no longer resolves the point mass of the
  /// Laplacian at S, so finite differences must keep the refinement.
  NuIntegral bost_integral(const CurvePoint& r, const CurvePoint& s, bool refine_at_s = true) const;

  /// log G(R,S); -infinity for coincident points.
  double log_green(const CurvePoint& r, const CurvePoint& s) const;
  Estimate log_green_estimate(const CurvePoint& r, const CurvePoint& s) const;

 private:
  CurveModel curve_;
  QuadratureConfig quad_;
  Estimate bost_A_;
};

/// G(r, s) >= 0. Exactly 0 for coincident points.
double green(const GreenEvaluator& ge, const CurvePoint& r, const CurvePoint& s);

/// int_X log G(P,Q) nu(Q) (zero for the canonical Green's function), by the
/// same sampled average with control variate as Bost's constant.
Estimate mean_log_green(const GreenEvaluator& ge, const CurvePoint& p, int samples = 8);

/// Five-point Laplacian of log G(P, .) in the x-chart at q with step h. The
/// quadrature runs one refinement level above the evaluator's setting.
double laplacian_log_green(const GreenEvaluator& ge, const CurvePoint& p, const CurvePoint& q, double h = 1e-3);

/// prod_i prod_j G(P_i, Q_j); 0 when the divisors share a point.
double green_divisor(const GreenEvaluator& ge, const DivisorOnCurve& d1, const DivisorOnCurve& d2);
double log_green_divisor(const GreenEvaluator& ge, const DivisorOnCurve& d1, const DivisorOnCurve& d2);

/// Local coordinate used for Arakelov norms of dz.
enum class LocalChart { X, InverseX };

/// The Arakelov metric on the canonical bundle, ||dz||_Ar(P) = lim |z(P) - z(Q)| / G(P,Q).
class ArakelovMetric {
 public:
  explicit ArakelovMetric(const GreenEvaluator& ge, int extrapolation_steps = 4, double initial_step = 1e-2);

  const GreenEvaluator& green() const { return ge_; }
  int extrapolation_steps() const { return steps_; }

  /// Richardson extrapolation over Q at chart distance h, h/2, h/4, ...
  Estimate log_dz_norm(const CurvePoint& p, LocalChart chart = LocalChart::X) const;
  double dz_norm(const CurvePoint& p, LocalChart chart = LocalChart::X) const;

 private:
  const GreenEvaluator& ge_;
  int steps_;
  double h0_;
};

double arakelov_dz_norm(const ArakelovMetric& m, const CurvePoint& p);

/// ||det omega_i(P_j)||_Ar for the orthonormal differentials, in the x-chart.
double log_det_omega_norm(const ArakelovMetric& m, const CurvePoint& p1, const CurvePoint& p2);

/// ||Wr(omega_1, omega_2)||_Ar(P). In the x-chart Wr = det(O) / y^2 (dx)^3; the
/// 1/x chart gives the same norm through its own coordinate.
double log_wronskian_norm(const ArakelovMetric& m, const CurvePoint& p, LocalChart chart = LocalChart::X);
double wronskian_norm(const ArakelovMetric& m, const CurvePoint& p, LocalChart chart = LocalChart::X);

struct DeltaResult {
  double delta = 0.0;
  double spread = 0.0;  // max deviation of a tuple estimate from the mean
  std::vector<double> estimates;
};

/// One tuple estimate of Faltings' delta from (P1, P2, Q).
double delta_from_tuple(const ArakelovMetric& m, const CurvePoint& p1, const CurvePoint& p2, const CurvePoint& q);

/// delta from n_tuples random tuples (points drawn with the evaluator's seed).
DeltaResult delta(const CurveModel& c, const GreenEvaluator& ge, int n_tuples);

/// log ||Lambda||(D, R, S) for a degree-1 divisor D = P.
double log_lambda_norm(const GreenEvaluator& ge, const DivisorOnCurve& d, const CurvePoint& r, const CurvePoint& s);
double lambda_norm(const CurveModel& c, const GreenEvaluator& ge, const DivisorOnCurve& d, const CurvePoint& r,
                   const CurvePoint& s);

struct CurveInvariants {
  double delta = 0.0;
  double delta_spread = 0.0;
  double bost_A = 0.0;
  double bost_A_crosscheck = 0.0;
  double eta_integral = 0.0;
  double delta_error = 0.0;
  double bost_A_error = 0.0;
  double bost_A_crosscheck_error = 0.0;
  double eta_integral_error = 0.0;
};

CurveInvariants compute_invariants(const CurveModel& c, const GreenEvaluator& ge, int n_tuples = 5);

/// Distance in the torus metric from the theta point of d to the nearest
/// Weierstrass image.
double distance_to_ramification(const CurveModel& c, const DivisorOnCurve& d);

/// log ||eta||(D) - [-delta/4 + log ||Lambda||(D) + log G(D, sigma D)], using
/// the auxiliary pair (r, s) for ||Lambda||.
double verify_main_theorem(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                           const DivisorOnCurve& d, const CurvePoint& r, const CurvePoint& s);
/// Same with a fixed auxiliary pair.
double verify_main_theorem(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                           const DivisorOnCurve& d);

/// log ||eta||(P) - [-3 delta/8 + log ||Wr||_Ar(P)].
double verify_wronskian_lemma(const CurveModel& c, const GreenEvaluator& ge, const CurveInvariants& inv,
                              const CurvePoint& p, LocalChart chart = LocalChart::X);

}  // namespace thetagreen
