#pragma once

// Shared helpers between the period computation, the quadrature atlas and the
// curve front end. Not installed.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "thetagreen/types.hpp"

namespace thetagreen::detail {

inline cd sqrt_p(cd z) { return std::sqrt(z); }

/// Roots of the monic quintic with coefficients c[0..5] (c[5] = 1), polished by Newton.
std::vector<cd> quintic_roots(const std::array<cd, 6>& c);

/// Lexicographic (Re, Im) order with a tolerance on the real parts.
void sort_branch_points(std::vector<cd>& roots);

/// prod_k sqrt_p(x - e_k): one fixed determination of y with cuts.
cd y_branch(const std::vector<cd>& roots, cd x);

/// Continue y from (x0, y0) to x1 by the product formula. Valid when
/// |x1 - x0| < |x0 - e| for every branch point e.
cd continue_y(const std::vector<cd>& roots, cd x0, cd y0, cd x1);

double distance_to_roots(const std::vector<cd>& roots, cd x);

/// Integrals of dx/y and x dx/y around the four ellipses enclosing consecutive
/// pairs of sorted branch points. `fraction` picks the ellipse between the
/// segment itself (0) and the nearest other branch point (1).
struct LoopPeriods {
  Eigen::Matrix<cd, 2, 4> values;
  int nodes = 0;
  double last_change = 0.0;  // relative change at the final doubling
};

LoopPeriods loop_periods(const std::vector<cd>& roots, double fraction, int min_nodes = 256);

/// A- and B-periods of (dx/y, x dx/y) for a symplectic basis assembled from the
/// loops; the intersection signs are fixed by the Riemann relations.
struct Homology {
  CMatrix period_a;  // [i][j] = integral of omega_i over A_j
  CMatrix period_b;
  Eigen::Matrix<int, 4, 4> basis;  // rows A1, A2, B1, B2 in loop coordinates
  double asymmetry = 0.0;
};

Homology symplectic_periods(const LoopPeriods& loops);

}  // namespace thetagreen::detail

// ---------------------------------------------------------------------------
// Curve data and the chart atlas used for Abel-Jacobi evaluation and for
// quadrature against nu.

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "thetagreen/curve.hpp"

namespace thetagreen::detail {

struct GaussRule {
  std::vector<double> x, w;  // nodes and weights on [0, 1]
};
const GaussRule& gauss_rule(int n);

enum class ChartKind { Branch, Infinity, Regular };

/// A coordinate disk |u| < radius on the curve.
struct Chart {
  ChartKind kind = ChartKind::Regular;
  int branch = -1;   // index of the branch point (Branch)
  cd center{};       // x of the center (Regular, Branch)
  cd y_center{};     // y at the center (Regular)
  cd h0{};           // prod_{m != k} sqrt(e_k - e_m) (Branch)
  double radius = 0.0;
  int radial_power = 1;  // radial nodes r = radius * q^p
  Eigen::Vector2cd aj_center = Eigen::Vector2cd::Zero();
  std::vector<Eigen::Vector2cd> series;  // Taylor coefficients of the normalised differentials
};

struct ChartPoint {
  cd x{};
  cd y{};
  bool at_infinity = false;
};

/// Position of a point in a chart. Regular charts live on one sheet; the
/// other sheet is reached through the involution, recorded as sign = -1
/// (y and the Abel-Jacobi image flip sign there).
struct Location {
  int chart = -1;
  cd u{};
  int sign = 1;
  double depth = 0.0;  // 1 - |u| / radius
};

/// A piece of an exact tiling of the x-sphere, parametrised over [0,1]^2.
///   Square:   x = p0 + side (a + i b)
///   Root:     x = apex + a (p0 - apex + b (p1 - p0))   (apex at a branch point)
///   Infinity: x = (p0 + b (p1 - p0)) / a               (apex at infinity)
/// Each piece carries a chart whose disk contains it; nodes are emitted on
/// both sheets.
enum class PatchKind { Square, Root, Infinity };

struct Patch {
  PatchKind kind = PatchKind::Square;
  int chart = -1;
  cd p0{}, p1{}, apex{};
  double side = 0.0;
};

struct NodeSet {
  std::vector<WeightedSample> nodes;
  std::vector<std::size_t> begin;  // nodes of patch i are [begin[i], begin[i+1])
};

/// Sub-rectangle [a0,a1] x [b0,b1] of a patch parameter square.
struct Rect {
  double a0 = 0.0, a1 = 1.0, b0 = 0.0, b1 = 1.0;
};

struct CurveData;

class Atlas {
 public:
  explicit Atlas(const CurveData& curve);

  const std::vector<Chart>& charts() const { return charts_; }
  const Chart& chart(int i) const { return charts_[i]; }
  int infinity_chart() const { return infinity_; }

  ChartPoint point(const Chart& c, cd u) const;
  /// omega_std = w(u) du with omega_std = (dx/y, x dx/y).
  Eigen::Vector2cd std_differential(const Chart& c, cd u) const;
  Eigen::Vector2cd aj(const Chart& c, cd u) const;
  /// nu density against the area element of the chart coordinate.
  double nu_density(const Chart& c, cd u) const;

  /// Coordinate (and sheet sign) of the point in the chart when it lies inside the disk.
  std::optional<Location> coordinate(int chart, const ChartPoint& p) const;
  /// Radial bump argument |u| / radius, ignoring the sheet.
  double radial(const Chart& c, const ChartPoint& p) const;
  /// Chart in which the point sits deepest.
  Location locate(const ChartPoint& p) const;

  const std::vector<Patch>& patches() const { return patches_; }
  /// Map a patch parameter to x; jac is the area factor |dx/d(a,b)|.
  cd patch_point(const Patch& p, double a, double b, double& jac) const;
  /// Inverse of patch_point (the result may fall outside the unit square).
  Eigen::Vector2d patch_param(const Patch& p, cd x) const;

  /// Gauss-Legendre order per parameter direction at a refinement level.
  int order(const QuadratureConfig& q, int level) const;
  /// Tensor rule on a sub-rectangle. With `edge_log`, a = 0 carries a
  /// logarithmic singularity and the a-nodes are graded as a1 * s^3.
  void tensor_nodes(const Patch& p, const Rect& r, int n, bool edge_log, std::vector<WeightedSample>& out) const;
  /// Four Duffy triangles of the sub-rectangle meeting at `apex`, graded towards it.
  void duffy_nodes(const Patch& p, const Rect& r, const Eigen::Vector2d& apex, int n,
                   std::vector<WeightedSample>& out) const;
  /// Both sheets over x with the given x-area weight (nu is applied here).
  void emit(const Patch& p, cd x, double area, std::vector<WeightedSample>& out) const;

  const NodeSet& nodes(const QuadratureConfig& q, int level) const;

  double r_infinity() const { return r_inf_; }
  double branch_radius(int k) const { return branch_r_[k]; }

  /// Straight-line path integration of the normalised differentials from
  /// infinity to (x, y); independent of the chart series.
  Eigen::Vector2cd path_aj(cd x, cd y, int direction = -1) const;

  cd branch_h(const Chart& c, cd s) const;
  cd infinity_s(cd t) const;

 private:
  void build_series(Chart& c) const;

  const CurveData& curve_;
  std::vector<Chart> charts_;
  std::vector<Patch> patches_;
  int infinity_ = -1;
  double r_inf_ = 0.0;        // the infinity chart covers |x| > r_inf_
  double square_half_ = 0.0;  // the tiling square is [-L, L]^2
  std::vector<double> branch_r_;  // x-radius of each branch chart

  mutable std::mutex mutex_;
  mutable std::map<std::tuple<std::uint64_t, int, int>, std::unique_ptr<NodeSet>> cache_;
};

struct CurveData {
  std::array<cd, 6> coeffs{};
  std::vector<cd> roots;
  CMatrix period_a, period_b, gram, ortho, omega_a_inv;
  std::optional<PeriodMatrix> tau;
  CVector kappa;
  std::shared_ptr<const ThetaFunction> theta;
  std::unique_ptr<Atlas> atlas;
  double path_delta = 0.0;
  int period_nodes = 0;

  /// Normalised differentials v = Omega_A^-1 (1, x) / y (coefficients of dx).
  Eigen::Vector2cd v_x(cd x, cd y) const {
    return Eigen::Matrix2cd(omega_a_inv) * Eigen::Vector2cd(1.0, x) / y;
  }
};

}  // namespace thetagreen::detail
