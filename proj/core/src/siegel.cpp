#include "thetagreen/siegel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "thetagreen/errors.hpp"

namespace thetagreen {

namespace {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) fail(ErrorKind::InvalidInput, "integer overflow in symplectic arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) fail(ErrorKind::InvalidInput, "integer overflow in symplectic arithmetic");
  return r;
}

IMatrix mul(const IMatrix& x, const IMatrix& y) {
  IMatrix r = IMatrix::Zero(x.rows(), y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      std::int64_t s = 0;
      for (Eigen::Index k = 0; k < x.cols(); ++k) s = checked_add(s, checked_mul(x(i, k), y(k, j)));
      r(i, j) = s;
    }
  return r;
}

IMatrix add(const IMatrix& x, const IMatrix& y) {
  IMatrix r(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) r(i) = checked_add(x(i), y(i));
  return r;
}

IMatrix sub(const IMatrix& x, const IMatrix& y) {
  IMatrix r(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) r(i) = checked_add(x(i), -y(i));
  return r;
}

std::int64_t det_int(const IMatrix& u) {
  const auto n = u.rows();
  if (n == 1) return u(0, 0);
  if (n == 2) return checked_add(checked_mul(u(0, 0), u(1, 1)), -checked_mul(u(0, 1), u(1, 0)));
  std::int64_t d = 0;
  for (int j = 0; j < 3; ++j) {
    const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
    const std::int64_t minor =
        checked_add(checked_mul(u(1, j1), u(2, j2)), -checked_mul(u(1, j2), u(2, j1)));
    d = checked_add(d, checked_mul(u(0, j), minor));
  }
  return d;
}

/// Inverse of a unimodular integer matrix via the adjugate (g <= 3).
IMatrix unimodular_inverse(const IMatrix& u) {
  const std::int64_t det = det_int(u);
  if (det != 1 && det != -1) fail(ErrorKind::InvalidInput, "basis change matrix is not unimodular");
  const auto n = u.rows();
  IMatrix inv(n, n);
  if (n == 1) {
    inv(0, 0) = det;
    return inv;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      IMatrix minor(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = u(r, c);
        }
        ++rr;
      }
      const std::int64_t cof = ((i + j) % 2 == 0 ? 1 : -1) * det_int(minor);
      inv(i, j) = cof * det;  // det = +-1, so dividing equals multiplying
    }
  return inv;
}

IMatrix eye(int g) { return IMatrix::Identity(g, g); }
IMatrix zeros(int g) { return IMatrix::Zero(g, g); }

CMatrix to_complex(const IMatrix& m) { return m.cast<double>().cast<cd>(); }

/// LLL reduction of the integer lattice with Gram matrix y. Returns U whose rows
/// form the reduced basis (so U y U^t is reduced).
IMatrix lll_basis(const RMatrix& y) {
  const int g = static_cast<int>(y.rows());
  IMatrix u = eye(g);
  const double delta = 0.75;
  int k = 1;
  int guard = 0;
  while (k < g && guard++ < 1000) {
    // Gram-Schmidt in the y inner product.
    RMatrix mu = RMatrix::Zero(g, g);
    RVector bstar(g);
    std::vector<RVector> star(g);
    for (int i = 0; i < g; ++i) {
      star[i] = u.row(i).cast<double>().transpose();
      for (int j = 0; j < i; ++j) {
        mu(i, j) = (u.row(i).cast<double>() * y * star[j]).value() / bstar(j);
        star[i] -= mu(i, j) * star[j];
      }
      bstar(i) = star[i].dot(y * star[i]);
    }
    for (int j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        u.row(k) -= static_cast<std::int64_t>(q) * u.row(j);
        for (int l = 0; l <= j; ++l) mu(k, l) -= q * (l == j ? 1.0 : mu(j, l));
      }
    }
    if (bstar(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar(k - 1)) {
      ++k;
    } else {
      u.row(k).swap(u.row(k - 1));
      k = std::max(k - 1, 1);
    }
  }
  return u;
}

double y_norm2(const PeriodMatrix& tau, const CVector& w) {
  return (w.adjoint() * tau.im_inverse().cast<cd>() * w).value().real();
}

}  // namespace

// --- PeriodMatrix -----------------------------------------------------------

PeriodMatrix::PeriodMatrix(const CMatrix& tau) {
  if (tau.rows() != tau.cols() || tau.rows() < 1 || tau.rows() > kMaxGenus) {
    fail(ErrorKind::InvalidInput, "period matrix must be square with genus 1.." +
                                      std::to_string(kMaxGenus));
  }
  for (Eigen::Index i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(tau(i).real()) || !std::isfinite(tau(i).imag()))
      fail(ErrorKind::InvalidInput, "period matrix has non-finite entries");
  }
  const double scale = 1.0 + tau.cwiseAbs().maxCoeff();
  const double asym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    std::ostringstream os;
    os << "period matrix is not symmetric (max |tau_jk - tau_kj| = " << asym << ")";
    fail(ErrorKind::InvalidInput, os.str());
  }
  tau_ = 0.5 * (tau + tau.transpose());
  im_ = tau_.imag();
  Eigen::LLT<RMatrix> llt(im_);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Domain, "Im tau is not positive definite");
  const RMatrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i) > 0.0)) fail(ErrorKind::Domain, "Im tau is not positive definite");
  chol_ = l.transpose();
  im_inv_ = llt.solve(RMatrix::Identity(im_.rows(), im_.cols()));
  im_inv_ = 0.5 * (im_inv_ + im_inv_.transpose()).eval();
  im_det_ = 1.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) im_det_ *= l(i, i) * l(i, i);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(im_, Eigen::EigenvaluesOnly);
  lambda_min_ = es.eigenvalues().minCoeff();
  if (!(lambda_min_ > 0.0)) fail(ErrorKind::Domain, "Im tau is not positive definite");
}

PeriodMatrix PeriodMatrix::scalar(cd tau) {
  CMatrix m(1, 1);
  m(0, 0) = tau;
  return PeriodMatrix(m);
}

PeriodMatrix PeriodMatrix::diagonal(std::initializer_list<cd> entries) {
  const int g = static_cast<int>(entries.size());
  CMatrix m = CMatrix::Zero(g, g);
  int i = 0;
  for (cd e : entries) m(i, i) = e, ++i;
  return PeriodMatrix(m);
}

// --- SymplecticMatrix -------------------------------------------------------

SymplecticMatrix::SymplecticMatrix(IMatrix a, IMatrix b, IMatrix c, IMatrix d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const auto g = a_.rows();
  for (const IMatrix* m : {&a_, &b_, &c_, &d_}) {
    if (m->rows() != g || m->cols() != g || g < 1 || g > kMaxGenus)
      fail(ErrorKind::InvalidInput, "symplectic blocks must be square of equal size 1..3");
  }
  const IMatrix atc = mul(a_.transpose(), c_);
  const IMatrix btd = mul(b_.transpose(), d_);
  const IMatrix rel = sub(mul(a_.transpose(), d_), mul(c_.transpose(), b_));
  if (atc != atc.transpose()) fail(ErrorKind::InvalidInput, "not symplectic: a^t c is not symmetric");
  if (btd != btd.transpose()) fail(ErrorKind::InvalidInput, "not symplectic: b^t d is not symmetric");
  if (rel != eye(static_cast<int>(g))) fail(ErrorKind::InvalidInput, "not symplectic: a^t d - c^t b != I");
}

SymplecticMatrix SymplecticMatrix::identity(int g) { return {eye(g), zeros(g), zeros(g), eye(g)}; }

SymplecticMatrix SymplecticMatrix::inversion(int g) { return {zeros(g), -eye(g), eye(g), zeros(g)}; }

SymplecticMatrix SymplecticMatrix::translation(const IMatrix& b) {
  const int g = static_cast<int>(b.rows());
  return {eye(g), b, zeros(g), eye(g)};
}

SymplecticMatrix SymplecticMatrix::basis_change(const IMatrix& u) {
  const int g = static_cast<int>(u.rows());
  return {u, zeros(g), zeros(g), unimodular_inverse(u).transpose()};
}

SymplecticMatrix SymplecticMatrix::partial_inversion(int g, int k) {
  IMatrix a = eye(g), b = zeros(g), c = zeros(g), d = eye(g);
  a(k, k) = 0;
  d(k, k) = 0;
  b(k, k) = -1;
  c(k, k) = 1;
  return {a, b, c, d};
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& r) const {
  if (genus() != r.genus()) fail(ErrorKind::InvalidInput, "genus mismatch in symplectic product");
  return {add(mul(a_, r.a_), mul(b_, r.c_)), add(mul(a_, r.b_), mul(b_, r.d_)),
          add(mul(c_, r.a_), mul(d_, r.c_)), add(mul(c_, r.b_), mul(d_, r.d_))};
}

bool SymplecticMatrix::operator==(const SymplecticMatrix& o) const {
  return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
}

bool is_in_gamma12(const SymplecticMatrix& m) {
  const IMatrix atc = mul(m.a().transpose(), m.c());
  const IMatrix btd = mul(m.b().transpose(), m.d());
  for (Eigen::Index i = 0; i < atc.rows(); ++i) {
    if (atc(i, i) % 2 != 0 || btd(i, i) % 2 != 0) return false;
  }
  return true;
}

// --- action -----------------------------------------------------------------

namespace {

struct Automorphy {
  CMatrix m;  // c tau + d
  CMatrix inv;
};

Automorphy automorphy(const SymplecticMatrix& g, const PeriodMatrix& tau) {
  if (g.genus() != tau.genus()) fail(ErrorKind::InvalidInput, "genus mismatch in symplectic action");
  Automorphy out;
  out.m = to_complex(g.c()) * tau.tau() + to_complex(g.d());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(out.m));
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  // Measure against the size of the ingredients as well, so that cancellation
  // in c tau + d (invisible to the singular value ratio when g = 1) is caught.
  const double scale = std::max(sv(0), to_complex(g.c()).norm() * tau.tau().norm() + to_complex(g.d()).norm());
  if (!(smin > 0.0) || scale / smin > 1e12)
    fail(ErrorKind::IllConditioned, "c tau + d is ill-conditioned (condition number > 1e12)");
  out.inv = out.m.inverse();
  return out;
}

}  // namespace

PeriodMatrix act(const SymplecticMatrix& g, const PeriodMatrix& tau) {
  const Automorphy am = automorphy(g, tau);
  const CMatrix t = (to_complex(g.a()) * tau.tau() + to_complex(g.b())) * am.inv;
  return PeriodMatrix(t);
}

AbelianPoint act(const SymplecticMatrix& g, const AbelianPoint& p) {
  const Automorphy am = automorphy(g, p.tau);
  const CMatrix t = (to_complex(g.a()) * p.tau.tau() + to_complex(g.b())) * am.inv;
  const CVector z = am.inv.transpose() * p.z;
  return {PeriodMatrix(t), z};
}

// --- reduction --------------------------------------------------------------

SiegelReduction siegel_reduce(const PeriodMatrix& tau) {
  const int g = tau.genus();
  SymplecticMatrix gamma = SymplecticMatrix::identity(g);
  PeriodMatrix cur = tau;
  for (int iter = 0; iter < 200; ++iter) {
    const IMatrix u = lll_basis(cur.im());
    if (u != eye(g)) {
      const SymplecticMatrix step = SymplecticMatrix::basis_change(u);
      gamma = step * gamma;
      cur = act(gamma, tau);
    }
    IMatrix shift(g, g);
    const RMatrix x = cur.re();
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) shift(i, j) = -static_cast<std::int64_t>(std::floor(x(i, j) + 0.5));
    if (shift != zeros(g)) {
      gamma = SymplecticMatrix::translation(shift) * gamma;
      cur = act(gamma, tau);
    }
    if (std::abs(cur.tau()(0, 0)) >= 1.0 - 1e-12) break;
    gamma = SymplecticMatrix::partial_inversion(g, 0) * gamma;
    cur = act(gamma, tau);
  }
  return {cur, gamma};
}

LatticeReduction reduce_modulo_lattice(const PeriodMatrix& tau, const CVector& z) {
  const int g = tau.genus();
  if (z.size() != g) fail(ErrorKind::InvalidInput, "point dimension does not match genus");
  const RVector c = tau.im_inverse() * z.imag();
  LatticeReduction out;
  out.n = IVector(g);
  out.m = IVector(g);
  for (int i = 0; i < g; ++i) out.n(i) = static_cast<std::int64_t>(std::floor(c(i) + 0.5));
  CVector w = z - tau.tau() * out.n.cast<double>().cast<cd>();
  for (int i = 0; i < g; ++i) {
    out.m(i) = static_cast<std::int64_t>(std::floor(w(i).real() + 0.5));
    w(i) -= static_cast<double>(out.m(i));
  }
  out.z = w;
  return out;
}

CVector lattice_vector(const PeriodMatrix& tau, const IVector& m, const IVector& n) {
  return m.cast<double>().cast<cd>() + tau.tau() * n.cast<double>().cast<cd>();
}

double torus_distance(const PeriodMatrix& tau, const CVector& z1, const CVector& z2) {
  const int g = tau.genus();
  const CVector w = reduce_modulo_lattice(tau, z1 - z2).z;
  double best = std::numeric_limits<double>::infinity();
  int total = 1;
  for (int i = 0; i < 2 * g; ++i) total *= 3;
  IVector m(g), n(g);
  for (int code = 0; code < total; ++code) {
    int rest = code;
    for (int i = 0; i < g; ++i) {
      m(i) = rest % 3 - 1;
      rest /= 3;
    }
    for (int i = 0; i < g; ++i) {
      n(i) = rest % 3 - 1;
      rest /= 3;
    }
    best = std::min(best, y_norm2(tau, w - lattice_vector(tau, m, n)));
  }
  return std::sqrt(std::max(best, 0.0));
}

bool in_lattice(const PeriodMatrix& tau, const CVector& z, double tol) {
  return torus_distance(tau, z, CVector::Zero(tau.genus())) <= tol;
}

}  // namespace thetagreen
