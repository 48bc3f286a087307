#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curve_internal.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen {

using detail::Atlas;
using detail::Patch;
using detail::PatchKind;
using detail::Rect;

namespace {

double rect_distance(const Rect& r, const Eigen::Vector2d& p) {
  const double da = std::max({r.a0 - p(0), 0.0, p(0) - r.a1});
  const double db = std::max({r.b0 - p(1), 0.0, p(1) - r.b1});
  return std::hypot(da, db);
}

bool rect_contains(const Rect& r, const Eigen::Vector2d& p) {
  return p(0) >= r.a0 && p(0) <= r.a1 && p(1) >= r.b0 && p(1) <= r.b1;
}

/// Rule for a rectangle with the singular point at one corner. Nearly square
/// pieces get Duffy triangles meeting at the corner. A long piece is cut into
/// a corner square plus strips whose length doubles away from the corner, so
/// every tensor piece sits at least its own size away from the singularity.
void corner_graded(const Atlas& atlas, const Patch& p, const Rect& r, const Eigen::Vector2d& apex, int n,
                   std::vector<WeightedSample>& out) {
  const double w = r.a1 - r.a0, h = r.b1 - r.b0;
  if (w <= 0.0 || h <= 0.0) return;
  const double a = std::min(w, h), b = std::max(w, h);
  if (b <= 2.0 * a) {
    atlas.duffy_nodes(p, r, apex, n, out);
    return;
  }
  const bool along_a = w > h;
  const double sa = apex(0) == r.a0 ? 1.0 : -1.0, sb = apex(1) == r.b0 ? 1.0 : -1.0;
  // piece covering offsets [lo, hi] from the apex along the long side
  auto piece = [&](double lo, double hi) {
    if (along_a) {
      const double x0 = apex(0) + sa * lo, x1 = apex(0) + sa * hi;
      return Rect{std::min(x0, x1), std::max(x0, x1), r.b0, r.b1};
    }
    const double y0 = apex(1) + sb * lo, y1 = apex(1) + sb * hi;
    return Rect{r.a0, r.a1, std::min(y0, y1), std::max(y0, y1)};
  };
  atlas.duffy_nodes(p, piece(0.0, a), apex, n, out);
  double lo = a;
  while (lo < b) {
    double hi = 2.0 * lo;
    if (hi >= b || b - hi < 0.5 * lo) hi = b;
    atlas.tensor_nodes(p, piece(lo, hi), n, false, out);
    lo = hi;
  }
}

/// Subdivide the parameter square of a patch around nearby singular points.
/// Far pieces get the tensor rule. The piece holding a point is cut at the
/// point into four rectangles that have it as a corner, so the rule moves
/// smoothly with the point and never sees it close to an edge.
void refine(const Atlas& atlas, const Patch& p, const Rect& r, const std::vector<Eigen::Vector2d>& pts, int n,
            bool edge_log, int depth, std::vector<WeightedSample>& out) {
  const double size = std::max(r.a1 - r.a0, r.b1 - r.b0);
  std::vector<Eigen::Vector2d> near;
  const Eigen::Vector2d* inside = nullptr;
  for (const auto& q : pts) {
    if (rect_distance(r, q) < size) near.push_back(q);
    if (rect_contains(r, q)) inside = &q;
  }
  if (near.empty()) {
    atlas.tensor_nodes(p, r, n, edge_log, out);
    return;
  }
  const bool touches_edge = edge_log && r.a0 == 0.0;
  if (inside && ((near.size() == 1 && !touches_edge) || depth >= 40)) {
    const Eigen::Vector2d& c = *inside;
    const Rect quads[4] = {{r.a0, c(0), r.b0, c(1)}, {c(0), r.a1, r.b0, c(1)}, {r.a0, c(0), c(1), r.b1},
                           {c(0), r.a1, c(1), r.b1}};
    for (const Rect& s : quads) corner_graded(atlas, p, s, c, n, out);
    return;
  }
  if (depth >= 40) {
    atlas.tensor_nodes(p, r, n, edge_log, out);
    return;
  }
  const double am = 0.5 * (r.a0 + r.a1), bm = 0.5 * (r.b0 + r.b1);
  const Rect parts[4] = {{r.a0, am, r.b0, bm}, {am, r.a1, r.b0, bm}, {r.a0, am, bm, r.b1}, {am, r.a1, bm, r.b1}};
  for (const Rect& s : parts) refine(atlas, p, s, pts, n, edge_log, depth + 1, out);
}

}  // namespace

std::vector<WeightedSample> quadrature_nodes(const CurveModel& c, const QuadratureConfig& q, int level) {
  q.validate();
  if (level < 0) fail(ErrorKind::InvalidInput, "refinement level must be non-negative");
  return c.data().atlas->nodes(q, level).nodes;
}

NuIntegral integrate_nu(const CurveModel& c, const CurveIntegrand& h, const QuadratureConfig& q,
                        const std::vector<CurvePoint>& singular) {
  q.validate();
  const Atlas& atlas = *c.data().atlas;
  const auto& roots = c.branch_points();
  const auto& patches = atlas.patches();

  // Singular points only matter through their x-coordinate: both sheets over
  // it are refined alike. Points at a branch point or at infinity sit on the
  // apex of their triangles and are handled by grading towards the apex.
  bool infinity_singular = false;
  std::vector<bool> root_singular(roots.size(), false);
  std::vector<cd> xs;
  for (const CurvePoint& p : singular) {
    if (p.at_infinity) {
      infinity_singular = true;
      continue;
    }
    bool at_root = false;
    for (std::size_t k = 0; k < roots.size(); ++k)
      if (std::abs(p.x - roots[k]) <= 1e-12 * (1.0 + std::abs(roots[k]))) root_singular[k] = at_root = true;
    if (at_root) continue;
    bool dup = false;
    for (cd x : xs) dup = dup || std::abs(x - p.x) <= 1e-14 * (1.0 + std::abs(x));
    if (!dup) xs.push_back(p.x);
  }

  struct Special {
    std::vector<Eigen::Vector2d> pts;
    bool edge = false;
  };
  std::vector<Special> special(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Patch& p = patches[i];
    for (cd x : xs) {
      const Eigen::Vector2d t = atlas.patch_param(p, x);
      if (std::isfinite(t(0)) && std::isfinite(t(1)) && rect_distance(Rect{}, t) < 1.0) special[i].pts.push_back(t);
    }
    if (p.kind == PatchKind::Root) special[i].edge = root_singular[p.chart - 1];
    if (p.kind == PatchKind::Infinity) special[i].edge = infinity_singular;
  }

  NuIntegral out;
  const int levels = q.refinement_levels + 1;
  std::vector<WeightedSample> local;
  for (int level = 0; level < levels; ++level) {
    const detail::NodeSet& base = atlas.nodes(q, level);
    const int n = atlas.order(q, level);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < patches.size(); ++i) {
      if (!special[i].edge && special[i].pts.empty()) {
        for (std::size_t k = base.begin[i]; k < base.begin[i + 1]; ++k) {
          const WeightedSample& s = base.nodes[k];
          sum += s.weight * h(s.sample);
        }
        count += base.begin[i + 1] - base.begin[i];
        continue;
      }
      local.clear();
      refine(atlas, patches[i], Rect{}, special[i].pts, n, special[i].edge, 0, local);
      for (const WeightedSample& s : local) sum += s.weight * h(s.sample);
      count += local.size();
    }
    out.levels.push_back(sum);
    out.nodes += count;
    if (!std::isfinite(sum) || sum < -1e3) {
      std::ostringstream os;
      os << "quadrature diverged at level " << level << " (running value " << sum << ")";
      fail(ErrorKind::NonConvergence, os.str());
    }
  }
  out.value = out.levels.back();
  out.error = std::abs(out.levels[levels - 1] - out.levels[levels - 2]);
  if (out.error > 0.5 * (1.0 + std::abs(out.value))) {
    std::ostringstream os;
    os << "quadrature levels disagree: " << out.levels[levels - 2] << " vs " << out.value;
    fail(ErrorKind::NonConvergence, os.str());
  }
  return out;
}

}  // namespace thetagreen
