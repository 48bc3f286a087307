#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>

#include "curve_internal.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen::detail {

namespace {


GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1.0 - t);
    r.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return r;
}

const GaussRule& gl16() { return gauss_rule(16); }

/// Distance from e to the segment [a, b].
double segment_distance(cd a, cd b, cd e) {
  const cd d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0.0 ? std::real((e - a) * std::conj(d)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(a + t * d - e);
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::mutex m;
  static std::map<int, GaussRule> rules;
  std::lock_guard<std::mutex> lock(m);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

Atlas::Atlas(const CurveData& curve) : curve_(curve) {
  const auto& roots = curve.roots;
  const int n = static_cast<int>(roots.size());
  double max_root = 0.0;
  for (cd e : roots) max_root = std::max(max_root, std::abs(e));
  branch_r_.resize(n);
  double min_sep = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    double d = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m)
      if (m != k) d = std::min(d, std::abs(roots[k] - roots[m]));
    branch_r_[k] = 0.55 * d;
    min_sep = std::min(min_sep, d);
  }
  square_half_ = std::max(2.5 * max_root, min_sep);
  r_inf_ = 0.95 * square_half_;

  Chart inf;
  inf.kind = ChartKind::Infinity;
  inf.radius = 1.0 / std::sqrt(r_inf_);
  charts_.push_back(inf);
  infinity_ = 0;

  for (int k = 0; k < n; ++k) {
    Chart b;
    b.kind = ChartKind::Branch;
    b.branch = k;
    b.center = roots[k];
    b.radius = std::sqrt(branch_r_[k]);
    b.h0 = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) b.h0 *= sqrt_p(roots[k] - roots[m]);
    charts_.push_back(b);
  }

  // Quadtree over the square [-L, L]^2. Leaves without a branch point become
  // Gauss squares (with a disk chart around them); a leaf holding one branch
  // point is cut into four triangles meeting there. Outside the square, four
  // triangles meet at infinity.
  const double big = square_half_;
  const double h_max = 0.5 * big;
  struct Cell {
    cd corner;  // lower-left
    double side;
    int depth;
  };
  std::vector<Cell> stack{{cd(-big, -big), 2.0 * big, 0}};
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    const cd center = cell.corner + 0.5 * cd(cell.side, cell.side);
    const double tol = 1e-12 * cell.side;
    std::vector<int> inside;
    for (int k = 0; k < n; ++k) {
      const cd d = roots[k] - cell.corner;
      if (d.real() >= -tol && d.real() <= cell.side + tol && d.imag() >= -tol && d.imag() <= cell.side + tol)
        inside.push_back(k);
    }
    const cd corners[4] = {cell.corner, cell.corner + cell.side, cell.corner + cd(cell.side, cell.side),
                           cell.corner + cd(0.0, cell.side)};
    bool leaf = false;
    if (inside.size() == 1) {
      const int k = inside[0];
      double reach = 0.0;
      for (cd c : corners) reach = std::max(reach, std::abs(c - roots[k]));
      leaf = reach <= 0.95 * branch_r_[k] && cell.side <= h_max;
      if (leaf) {
        for (int e = 0; e < 4; ++e) {
          Patch t;
          t.kind = PatchKind::Root;
          t.chart = 1 + k;
          t.apex = roots[k];
          t.p0 = corners[e];
          t.p1 = corners[(e + 1) % 4];
          t.side = cell.side;
          const cd dd = t.p0 - t.apex, ee = t.p1 - t.p0;
          if (std::abs(std::imag(std::conj(dd) * ee)) > 1e-14 * cell.side * cell.side) patches_.push_back(t);
        }
      }
    } else if (inside.empty()) {
      const double d = distance_to_roots(roots, center);
      leaf = cell.side <= 0.7 * d && cell.side <= h_max;
      if (leaf) {
        Chart r;
        r.kind = ChartKind::Regular;
        r.center = center;
        r.y_center = y_branch(roots, center);
        r.radius = 0.75 * cell.side;
        charts_.push_back(r);
        Patch sq;
        sq.kind = PatchKind::Square;
        sq.chart = static_cast<int>(charts_.size()) - 1;
        sq.p0 = cell.corner;
        sq.side = cell.side;
        patches_.push_back(sq);
      }
    }
    if (leaf) continue;
    if (cell.depth > 60) fail(ErrorKind::IllConditioned, "quadrature tiling does not resolve the branch points");
    const double h = 0.5 * cell.side;
    for (int sx = 0; sx < 2; ++sx)
      for (int sy = 0; sy < 2; ++sy) stack.push_back({cell.corner + cd(sx * h, sy * h), h, cell.depth + 1});
  }
  const cd box[4] = {cd(big, -big), cd(big, big), cd(-big, big), cd(-big, -big)};
  for (int e = 0; e < 4; ++e) {
    Patch t;
    t.kind = PatchKind::Infinity;
    t.chart = infinity_;
    t.p0 = box[e];
    t.p1 = box[(e + 1) % 4];
    t.side = 2.0 * big;
    patches_.push_back(t);
  }

  for (Chart& c : charts_) build_series(c);
  for (Chart& c : charts_) {
    if (c.kind == ChartKind::Regular) c.aj_center = path_aj(c.center, c.y_center);
    if (c.kind == ChartKind::Branch) c.aj_center = path_aj(c.center, 0.0);
  }
}

cd Atlas::branch_h(const Chart& c, cd s) const {
  const auto& roots = curve_.roots;
  cd h = c.h0;
  const cd s2 = s * s;
  for (int m = 0; m < static_cast<int>(roots.size()); ++m)
    if (m != c.branch) h *= sqrt_p(1.0 + s2 / (roots[c.branch] - roots[m]));
  return h;
}

cd Atlas::infinity_s(cd t) const {
  cd s = 1.0;
  const cd t2 = t * t;
  for (cd e : curve_.roots) s *= sqrt_p(1.0 - e * t2);
  return s;
}

ChartPoint Atlas::point(const Chart& c, cd u) const {
  ChartPoint p;
  switch (c.kind) {
    case ChartKind::Regular:
      p.x = c.center + u;
      p.y = continue_y(curve_.roots, c.center, c.y_center, p.x);
      break;
    case ChartKind::Branch:
      p.x = c.center + u * u;
      p.y = u * branch_h(c, u);
      break;
    case ChartKind::Infinity:
      if (u == 0.0) {
        p.at_infinity = true;
        break;
      }
      p.x = 1.0 / (u * u);
      p.y = infinity_s(u) / std::pow(u, 5);
      break;
  }
  return p;
}

Eigen::Vector2cd Atlas::std_differential(const Chart& c, cd u) const {
  switch (c.kind) {
    case ChartKind::Regular: {
      const ChartPoint p = point(c, u);
      return Eigen::Vector2cd(1.0, p.x) / p.y;
    }
    case ChartKind::Branch: {
      const cd h = branch_h(c, u);
      const cd x = c.center + u * u;
      return Eigen::Vector2cd(2.0, 2.0 * x) / h;
    }
    case ChartKind::Infinity: {
      const cd s = infinity_s(u);
      return Eigen::Vector2cd(-2.0 * u * u, -2.0) / s;
    }
  }
  return Eigen::Vector2cd::Zero();
}

double Atlas::nu_density(const Chart& c, cd u) const {
  const Eigen::Vector2cd w = Eigen::Matrix2cd(curve_.ortho) * std_differential(c, u);
  return 0.5 * w.squaredNorm();
}

void Atlas::build_series(Chart& c) const {
  // Samples on the circle half-way (geometrically) between the chart disk and
  // the nearest singularity of the differentials in the chart coordinate.
  const auto& roots = curve_.roots;
  double reach = 0.0;
  switch (c.kind) {
    case ChartKind::Regular:
      reach = distance_to_roots(roots, c.center);
      break;
    case ChartKind::Branch: {
      double d = std::numeric_limits<double>::infinity();
      for (int m = 0; m < static_cast<int>(roots.size()); ++m)
        if (m != c.branch) d = std::min(d, std::abs(roots[m] - c.center));
      reach = std::sqrt(d);
      break;
    }
    case ChartKind::Infinity: {
      double m = 0.0;
      for (cd e : roots) m = std::max(m, std::abs(e));
      reach = 1.0 / std::sqrt(m);
      break;
    }
  }
  const int samples_n = c.kind == ChartKind::Regular ? 128 : 256;
  const int terms = samples_n * 3 / 4;
  const double r = std::sqrt(c.radius * reach);
  std::vector<Eigen::Vector2cd> samples(samples_n);
  const Eigen::Matrix2cd ainv = curve_.omega_a_inv;
  for (int j = 0; j < samples_n; ++j) {
    const cd u = std::polar(r, 2.0 * kPi * j / samples_n);
    samples[j] = ainv * std_differential(c, u);
  }
  c.series.assign(terms, Eigen::Vector2cd::Zero());
  for (int n = 0; n < terms; ++n) {
    Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
    for (int j = 0; j < samples_n; ++j)
      acc += samples[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>((j * n) % samples_n) / samples_n);
    // coefficient of u^(n+1) in the primitive
    c.series[n] = acc / (samples_n * std::pow(r, n) * (n + 1.0));
  }
}

Eigen::Vector2cd Atlas::aj(const Chart& c, cd u) const {
  Eigen::Vector2cd acc = Eigen::Vector2cd::Zero();
  for (int n = static_cast<int>(c.series.size()) - 1; n >= 0; --n) acc = acc * u + c.series[n];
  return c.aj_center + acc * u;
}

double Atlas::radial(const Chart& c, const ChartPoint& p) const {
  switch (c.kind) {
    case ChartKind::Regular:
      if (p.at_infinity) return std::numeric_limits<double>::infinity();
      return std::abs(p.x - c.center) / c.radius;
    case ChartKind::Branch:
      if (p.at_infinity) return std::numeric_limits<double>::infinity();
      return std::sqrt(std::abs(p.x - c.center)) / c.radius;
    case ChartKind::Infinity:
      if (p.at_infinity) return 0.0;
      return 1.0 / (std::sqrt(std::abs(p.x)) * c.radius);
  }
  return std::numeric_limits<double>::infinity();
}

std::optional<Location> Atlas::coordinate(int index, const ChartPoint& p) const {
  const Chart& c = charts_[index];
  const double q = radial(c, p);
  if (!(q < 1.0)) return std::nullopt;
  Location loc;
  loc.chart = index;
  loc.depth = 1.0 - q;
  switch (c.kind) {
    case ChartKind::Regular: {
      loc.u = p.x - c.center;
      const cd yc = continue_y(curve_.roots, c.center, c.y_center, p.x);
      loc.sign = std::abs(p.y - yc) <= std::abs(p.y + yc) ? 1 : -1;
      break;
    }
    case ChartKind::Branch: {
      cd s = sqrt_p(p.x - c.center);
      const cd ys = s * branch_h(c, s);
      if (std::abs(p.y - ys) > std::abs(p.y + ys)) s = -s;
      loc.u = s;
      break;
    }
    case ChartKind::Infinity: {
      if (p.at_infinity) {
        loc.u = 0.0;
        break;
      }
      cd t = 1.0 / sqrt_p(p.x);
      const cd yt = infinity_s(t) / std::pow(t, 5);
      if (std::abs(p.y - yt) > std::abs(p.y + yt)) t = -t;
      loc.u = t;
      break;
    }
  }
  return loc;
}

Location Atlas::locate(const ChartPoint& p) const {
  Location best;
  best.depth = -1.0;
  for (int i = 0; i < static_cast<int>(charts_.size()); ++i) {
    const double q = radial(charts_[i], p);
    if (q < 1.0 && 1.0 - q > best.depth) {
      best = *coordinate(i, p);
    }
  }
  if (best.chart < 0) fail(ErrorKind::Domain, "point is not covered by the chart atlas");
  return best;
}

cd Atlas::patch_point(const Patch& p, double a, double b, double& jac) const {
  switch (p.kind) {
    case PatchKind::Square:
      jac = p.side * p.side;
      return p.p0 + p.side * cd(a, b);
    case PatchKind::Root: {
      const cd d = p.p0 - p.apex, e = p.p1 - p.p0;
      jac = a * std::imag(std::conj(d) * e);
      return p.apex + a * (d + b * e);
    }
    case PatchKind::Infinity: {
      const cd e = p.p1 - p.p0;
      const cd g = p.p0 + b * e;
      jac = std::imag(std::conj(g) * e) / (a * a * a);
      return g / a;
    }
  }
  jac = 0.0;
  return {};
}

Eigen::Vector2d Atlas::patch_param(const Patch& p, cd x) const {
  switch (p.kind) {
    case PatchKind::Square: {
      const cd t = (x - p.p0) / p.side;
      return {t.real(), t.imag()};
    }
    case PatchKind::Root: {
      // x - apex = a d + (a b) e
      const cd d = p.p0 - p.apex, e = p.p1 - p.p0, v = x - p.apex;
      Eigen::Matrix2d m;
      m << d.real(), e.real(), d.imag(), e.imag();
      const Eigen::Vector2d s = m.inverse() * Eigen::Vector2d(v.real(), v.imag());
      const double a = s(0);
      return {a, std::abs(a) > 0.0 ? s(1) / a : 0.5};
    }
    case PatchKind::Infinity: {
      // a x - b e = p0
      const cd e = p.p1 - p.p0;
      Eigen::Matrix2d m;
      m << x.real(), -e.real(), x.imag(), -e.imag();
      return m.inverse() * Eigen::Vector2d(p.p0.real(), p.p0.imag());
    }
  }
  return {0.0, 0.0};
}

int Atlas::order(const QuadratureConfig& q, int level) const {
  const double per_patch = static_cast<double>(q.n_nodes) / (2.0 * patches_.size());
  const int base = std::max(4, static_cast<int>(std::lround(std::sqrt(per_patch))));
  return base + 2 * level;
}

void Atlas::emit(const Patch& p, cd x, double area, std::vector<WeightedSample>& out) const {
  const Chart& c = charts_[p.chart];
  cd u{}, y{};
  switch (c.kind) {
    case ChartKind::Regular:
      u = x - c.center;
      y = continue_y(curve_.roots, c.center, c.y_center, x);
      break;
    case ChartKind::Branch:
      u = sqrt_p(x - c.center);
      y = u * branch_h(c, u);
      break;
    case ChartKind::Infinity:
      u = 1.0 / sqrt_p(x);
      y = infinity_s(u) / std::pow(u, 5);
      break;
  }
  const Eigen::Vector2cd w = Eigen::Matrix2cd(curve_.ortho) * Eigen::Vector2cd(1.0, x);
  const double weight = area * 0.5 * w.squaredNorm() / std::norm(y);
  WeightedSample s;
  s.sample.x = x;
  s.sample.y = y;
  s.sample.at_infinity = false;
  s.sample.aj = aj(c, u);
  s.weight = weight;
  out.push_back(s);
  s.sample.y = -y;
  s.sample.aj = c.kind == ChartKind::Regular ? Eigen::Vector2cd(-s.sample.aj) : aj(c, -u);
  out.push_back(s);
}

void Atlas::tensor_nodes(const Patch& p, const Rect& r, int n, bool edge_log,
                         std::vector<WeightedSample>& out) const {
  const GaussRule& g = gauss_rule(n);
  const bool graded = edge_log && r.a0 == 0.0;
  for (int i = 0; i < n; ++i) {
    double a, wa;
    if (graded) {
      const double s = g.x[i];
      a = r.a1 * s * s * s;
      wa = 3.0 * r.a1 * s * s * g.w[i];
    } else {
      a = r.a0 + (r.a1 - r.a0) * g.x[i];
      wa = (r.a1 - r.a0) * g.w[i];
    }
    for (int j = 0; j < n; ++j) {
      const double b = r.b0 + (r.b1 - r.b0) * g.x[j];
      const double wb = (r.b1 - r.b0) * g.w[j];
      double jac = 0.0;
      const cd x = patch_point(p, a, b, jac);
      emit(p, x, wa * wb * jac, out);
    }
  }
}

void Atlas::duffy_nodes(const Patch& p, const Rect& r, const Eigen::Vector2d& apex, int n,
                        std::vector<WeightedSample>& out) const {
  const GaussRule& g = gauss_rule(n);
  const Eigen::Vector2d corners[4] = {{r.a0, r.b0}, {r.a1, r.b0}, {r.a1, r.b1}, {r.a0, r.b1}};
  for (int e = 0; e < 4; ++e) {
    const Eigen::Vector2d v0 = corners[e] - apex, dv = corners[(e + 1) % 4] - corners[e];
    const double cross = v0(0) * dv(1) - v0(1) * dv(0);
    if (std::abs(cross) < 1e-300) continue;
    for (int i = 0; i < n; ++i) {
      const double s = g.x[i];
      const double t = s * s * s;
      const double wt = 3.0 * s * s * g.w[i] * t * cross;
      for (int j = 0; j < n; ++j) {
        const Eigen::Vector2d q = apex + t * (v0 + g.x[j] * dv);
        double jac = 0.0;
        const cd x = patch_point(p, q(0), q(1), jac);
        emit(p, x, wt * g.w[j] * jac, out);
      }
    }
  }
}

const NodeSet& Atlas::nodes(const QuadratureConfig& q, int level) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const int n = order(q, level);
  const auto key = std::make_tuple(std::uint64_t{0}, n, 0);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto set = std::make_unique<NodeSet>();
  for (const Patch& p : patches_) {
    set->begin.push_back(set->nodes.size());
    tensor_nodes(p, Rect{}, n, false, set->nodes);
  }
  set->begin.push_back(set->nodes.size());
  auto& slot = cache_[key];
  slot = std::move(set);
  return *slot;
}

Eigen::Vector2cd Atlas::path_aj(cd x, cd y, int direction) const {
  const auto& roots = curve_.roots;
  const int n = static_cast<int>(roots.size());
  const Eigen::Matrix2cd ainv = curve_.omega_a_inv;
  const GaussRule& rule = gl16();

  int k_near = -1;
  for (int k = 0; k < n; ++k)
    if (std::abs(x - roots[k]) < 0.5 * branch_r_[k]) k_near = k;

  // candidate start points on |x| = 1.05 R and end points of the straight leg
  std::vector<std::pair<cd, cd>> options;
  for (int i = 0; i < 16; ++i) {
    const cd start = std::polar(1.05 * r_inf_, 2.0 * kPi * (i + 0.5) / 16.0);
    if (k_near < 0) {
      options.emplace_back(start, x);
    } else {
      for (int j = 0; j < 8; ++j)
        options.emplace_back(start, roots[k_near] + std::polar(0.5 * branch_r_[k_near], 2.0 * kPi * j / 8.0));
    }
  }
  auto clearance = [&](const std::pair<cd, cd>& o) {
    double d = std::numeric_limits<double>::infinity();
    for (cd e : roots) d = std::min(d, segment_distance(o.first, o.second, e));
    return d;
  };
  std::pair<cd, cd> leg;
  if (direction >= 0) {
    const int per = k_near < 0 ? 1 : 8;
    leg = options[static_cast<std::size_t>((direction % 16) * per)];
  } else {
    double best = -1.0;
    for (const auto& o : options) {
      const double c = clearance(o);
      if (c > best) best = c, leg = o;
    }
  }
  if (clearance(leg) < 1e-8)
    fail(ErrorKind::Singular, "integration path passes within 1e-8 of a branch point");

  Eigen::Vector2cd sum = Eigen::Vector2cd::Zero();

  // leg 1: from infinity in the local parameter t = x^(-1/2)
  const cd t_end = 1.0 / sqrt_p(leg.first);
  const int t_pieces = 4;
  for (int p = 0; p < t_pieces; ++p) {
    const cd a = t_end * (static_cast<double>(p) / t_pieces);
    const cd b = t_end * (static_cast<double>(p + 1) / t_pieces);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const cd t = a + (b - a) * rule.x[i];
      const cd s = infinity_s(t);
      sum += rule.w[i] * (b - a) * (ainv * Eigen::Vector2cd(-2.0 * t * t, -2.0) / s);
    }
  }
  cd xc = leg.first;
  cd yc = infinity_s(t_end) / std::pow(t_end, 5);

  // leg 2: straight line in x with y continued step by step
  const double total = std::abs(leg.second - leg.first);
  double travelled = 0.0;
  const cd dir = total > 0.0 ? (leg.second - leg.first) / total : cd(0.0);
  int guard = 0;
  while (travelled < total) {
    const double dist = distance_to_roots(roots, xc);
    if (dist < 1e-8) fail(ErrorKind::Singular, "integration path passes within 1e-8 of a branch point");
    const double step = std::min(total - travelled, 0.25 * dist);
    const cd xn = travelled + step >= total ? leg.second : xc + dir * step;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const cd xi = xc + (xn - xc) * rule.x[i];
      const cd yi = continue_y(roots, xc, yc, xi);
      sum += rule.w[i] * (xn - xc) * (ainv * Eigen::Vector2cd(1.0, xi) / yi);
    }
    yc = continue_y(roots, xc, yc, xn);
    xc = xn;
    travelled += step;
    if (++guard > 1000000) fail(ErrorKind::NonConvergence, "path integration did not terminate");
  }

  if (k_near < 0) {
    if (std::abs(yc - y) > std::abs(yc + y)) sum = -sum;
    return sum;
  }

  // leg 3: inside the branch disk in the parameter s = sqrt(x - e)
  const Chart& bc = charts_[1 + k_near];
  cd sb = sqrt_p(xc - bc.center);
  if (std::abs(sb * branch_h(bc, sb) - yc) > std::abs(sb * branch_h(bc, sb) + yc)) sb = -sb;
  cd st = sqrt_p(x - bc.center);
  if (std::abs(st * branch_h(bc, st) - y) > std::abs(st * branch_h(bc, st) + y)) st = -st;
  for (int p = 0; p < 4; ++p) {
    const cd a = sb + (st - sb) * (p / 4.0);
    const cd b = sb + (st - sb) * ((p + 1) / 4.0);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const cd s = a + (b - a) * rule.x[i];
      const cd h = branch_h(bc, s);
      const cd xs = bc.center + s * s;
      sum += rule.w[i] * (b - a) * (ainv * Eigen::Vector2cd(2.0, 2.0 * xs) / h);
    }
  }
  return sum;
}

}  // namespace thetagreen::detail
