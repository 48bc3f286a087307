#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "thetagreen/theta.hpp"

namespace thetagreen {

/// A point of the genus-2 curve y^2 = f(x). Finite points carry a sheet: the
/// point is (x, sheet * y_branch(x)) with y_branch(x) = prod_k sqrt(x - e_k)
/// (principal square roots). The point at infinity has no sheet.
struct CurvePoint {
  cd x{};
  int sheet = 1;
  bool at_infinity = false;

  static CurvePoint infinity() { return {cd{}, 1, true}; }
  static CurvePoint finite(cd x, int sheet) { return {x, sheet, false}; }
};

CurvePoint involution(const CurvePoint& p);

/// Formal sum of curve points with multiplicity (effective divisors only).
struct DivisorOnCurve {
  std::vector<CurvePoint> points;
  int degree() const { return static_cast<int>(points.size()); }
};

DivisorOnCurve involution(const DivisorOnCurve& d);

/// Resolution of the deterministic quadrature on the curve. n_nodes is the
/// node budget per unit of nu-mass at the base level; every refinement level
/// multiplies it by about 1.7. The rule itself is fixed; the seed only drives
/// the sampled outer averages built on top of it.
struct QuadratureConfig {
  std::uint64_t seed = 0;
  int n_nodes = 4000;
  int refinement_levels = 2;

  void validate() const;
};

/// One quadrature node handed to an integrand.
struct CurveSample {
  cd x{};
  cd y{};
  bool at_infinity = false;
  CVector aj;  // Abel-Jacobi image (not reduced modulo the lattice)
};

/// Integral with an error estimate from the spread of refinement levels.
struct NuIntegral {
  double value = 0.0;
  double error = 0.0;
  std::vector<double> levels;
  std::size_t nodes = 0;
};

namespace detail {
struct CurveData;
}

/// Genus-2 curve in the odd model y^2 = f(x), f monic of degree 5, together
/// with its periods, the orthonormal differentials and the Riemann constant.
/// Immutable and cheap to copy.
class CurveModel {
 public:
  /// c0..c4, c5 = 1.
  const std::array<cd, 6>& f_coeffs() const;
  /// The five finite branch points in lexicographic order.
  const std::vector<cd>& branch_points() const;
  const CMatrix& period_a() const;
  const CMatrix& period_b() const;
  const PeriodMatrix& tau() const;
  /// gram(i,j) = (i/2) int w_i ^ conj(w_j) for w = (dx/y, x dx/y).
  const CMatrix& gram() const;
  /// O with O gram O^H = I; the orthonormal differentials are O (dx/y, x dx/y).
  const CMatrix& ortho_basis() const;
  const CVector& riemann_constant() const;
  const ThetaFunction& theta() const;

  /// Relative period change between the chosen ellipses and a second family of
  /// paths with doubled quadrature, recorded at build time.
  double period_path_delta() const;
  int period_nodes() const;

  cd f(cd x) const;
  cd y(const CurvePoint& p) const;
  /// Point with the given x whose y continues the value y_ref.
  CurvePoint point_with_y(cd x, cd y) const;
  bool is_weierstrass(const CurvePoint& p, double tol = 1e-12) const;
  std::vector<CurvePoint> weierstrass_points() const;

  const detail::CurveData& data() const { return *data_; }

 private:
  friend CurveModel build_curve(const std::array<cd, 6>& coeffs);
  explicit CurveModel(std::shared_ptr<const detail::CurveData> d) : data_(std::move(d)) {}
  std::shared_ptr<const detail::CurveData> data_;
};

/// Builds the curve from c0..c5 (c5 must be 1).
CurveModel build_curve(const std::array<cd, 6>& coeffs);
/// Convenience: c0..c4 with the leading 1 implied.
CurveModel build_curve(const std::vector<cd>& c0_to_c4);

/// Abel-Jacobi image with base point at infinity, reduced modulo the lattice.
AbelianPoint abel_jacobi(const CurveModel& c, const CurvePoint& p);
AbelianPoint abel_jacobi(const CurveModel& c, const DivisorOnCurve& d);
/// Unreduced image from the atlas (consistent across calls).
CVector abel_jacobi_vector(const CurveModel& c, const CurvePoint& p);
/// Independent route: straight-line path integration from infinity.
CVector abel_jacobi_by_path(const CurveModel& c, const CurvePoint& p);

/// AJ(d) - kappa for a degree-1 divisor.
AbelianPoint divisor_to_theta_point(const CurveModel& c, const DivisorOnCurve& d);

/// (1/g) sum_k |phi_k(x)|^2 / |f(x)| with omega_k = phi_k dx/y orthonormal.
double nu_density(const CurveModel& c, const CurvePoint& p);

/// Density of the pull-back of mu = (i/2) sum (Y^-1)_jk dz_j ^ conj(dz_k) under
/// the Abel-Jacobi map, against the x-chart area element.
double pullback_mu_density(const CurveModel& c, const CurvePoint& p);

/// Orthonormal differentials at p in the x-chart: omega_k = phi_k(x) dx.
CVector ortho_differentials_x(const CurveModel& c, const CurvePoint& p);

using CurveIntegrand = std::function<double(const CurveSample&)>;

/// int_X h nu. `singular` lists points where h has a logarithmic singularity;
/// each gets a local polar grid. Throws NonConvergence when the refinement
/// levels disagree wildly or the running mean drops below -1e3.
NuIntegral integrate_nu(const CurveModel& c, const CurveIntegrand& h, const QuadratureConfig& q,
                        const std::vector<CurvePoint>& singular = {});

/// All quadrature nodes of one refinement level with their nu-weights (no
/// singular points). Weights sum to about one.
struct WeightedSample {
  CurveSample sample;
  double weight;
};
std::vector<WeightedSample> quadrature_nodes(const CurveModel& c, const QuadratureConfig& q, int level);

/// Random point of the curve away from branch points (|x| <= radius).
CurvePoint random_curve_point(const CurveModel& c, std::mt19937_64& rng, double radius = 1.5,
                              double min_branch_distance = 1e-2);

}  // namespace thetagreen
