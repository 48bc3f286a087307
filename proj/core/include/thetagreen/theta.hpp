#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "thetagreen/siegel.hpp"

namespace thetagreen {

enum class JetOrder { Value = 0, Gradient = 1, Hessian = 2 };

/// Value, gradient and Hessian of the Riemann theta function at one point.
///
/// Two copies are kept. The plain fields hold theta and its partials. The
/// scaled_ fields hold the same numbers multiplied by exp(-log_scale), with
/// log_scale = pi y^t Y^-1 y; they stay O(1) even where theta itself is huge,
/// and every norm is computed from them.
struct ThetaJet {
  cd value{};
  CVector grad;
  CMatrix hess;
  double err_bound = 0.0;  // absolute truncation bound on every plain component

  double log_scale = 0.0;
  cd scaled_value{};
  CVector scaled_grad;
  CMatrix scaled_hess;
  double scaled_err_bound = 0.0;

  double radius = 0.0;  // truncation radius actually used
  JetOrder order = JetOrder::Hessian;
};

/// Theta function for a fixed period matrix.
///
/// Owns the tail-bound table for its lattice, so picking a certified truncation
/// radius is a table lookup. Instances are immutable apart from a lazily
/// computed scale for divisor membership, initialised exactly once.
class ThetaFunction {
 public:
  explicit ThetaFunction(PeriodMatrix tau);

  const PeriodMatrix& period() const { return tau_; }
  int genus() const { return tau_.genus(); }

  /// Jet with truncation error at most eps in every requested component.
  ThetaJet jet(const CVector& z, double eps, JetOrder order = JetOrder::Hessian) const;

  /// Jet summed over the ellipsoid of the given radius (in the Y-metric); the
  /// reported bounds are those certified for that radius.
  ThetaJet jet_with_radius(const CVector& z, double radius, JetOrder order) const;

  /// Certified bound on the scaled tail beyond `radius`; c_norm = |Y^-1 y|.
  double tail_bound(double radius, JetOrder order, double c_norm) const;

  /// Smallest tabulated radius whose scaled tail bound is <= target.
  double radius_for(double target, JetOrder order, double c_norm) const;

  /// (det Y)^{1/4} e^{-pi y^t Y^-1 y} |theta(z)|.
  double norm(const CVector& z, double eps = 1e-12) const;
  double log_norm(const CVector& z, double eps = 1e-12) const;

  /// Median of the norm over 100 fixed quasi-random torus points.
  double divisor_scale() const;

  bool on_divisor(const CVector& z, double tol) const;

 private:
  struct TailRow {
    double radius;
    double t0, t1, t2;
  };

  PeriodMatrix tau_;
  double rho_ = 0.0;
  std::vector<TailRow> table_;

  mutable std::once_flag scale_once_;
  mutable double scale_ = 0.0;
};

/// Shared instance for tau (memoised; thread safe).
std::shared_ptr<const ThetaFunction> theta_function(const PeriodMatrix& tau);

ThetaJet theta_jet(const AbelianPoint& p, double eps, JetOrder order = JetOrder::Hessian);
double theta_norm(const AbelianPoint& p, double eps = 1e-12);
bool on_theta_divisor(const AbelianPoint& p, double tol);

/// Radical-inverse (Halton) point number `index` in [0,1)^dim, dim <= 6.
std::vector<double> halton_point(int index, int dim);

}  // namespace thetagreen
