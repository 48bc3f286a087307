#pragma once

#include <optional>

#include "thetagreen/types.hpp"

namespace thetagreen {

/// A point tau of the Siegel upper half space: symmetric, Im tau positive definite.
///
/// Construction validates both invariants and stores an exactly symmetrized copy
/// together with the derived data every theta evaluation needs (Y, Y^-1, the
/// upper Cholesky factor T with Y = T^t T, det Y and the smallest eigenvalue of Y).
class PeriodMatrix {
 public:
  explicit PeriodMatrix(const CMatrix& tau);

  static PeriodMatrix scalar(cd tau);
  static PeriodMatrix diagonal(std::initializer_list<cd> entries);

  int genus() const { return static_cast<int>(tau_.rows()); }
  const CMatrix& tau() const { return tau_; }
  RMatrix re() const { return tau_.real(); }
  const RMatrix& im() const { return im_; }
  const RMatrix& im_inverse() const { return im_inv_; }
  /// Upper-triangular T with Y = T^t T.
  const RMatrix& im_cholesky() const { return chol_; }
  double im_det() const { return im_det_; }
  double im_min_eigenvalue() const { return lambda_min_; }

  bool operator==(const PeriodMatrix& other) const { return tau_ == other.tau_; }

 private:
  CMatrix tau_;
  RMatrix im_;
  RMatrix im_inv_;
  RMatrix chol_;
  double im_det_ = 0.0;
  double lambda_min_ = 0.0;
};

/// An element of Sp(2g, Z) in block form (a b; c d), validated with exact
/// (overflow-checked) 64-bit integer arithmetic.
class SymplecticMatrix {
 public:
  SymplecticMatrix(IMatrix a, IMatrix b, IMatrix c, IMatrix d);

  static SymplecticMatrix identity(int g);
  /// (0 -I; I 0)
  static SymplecticMatrix inversion(int g);
  /// (I B; 0 I) for integral symmetric B.
  static SymplecticMatrix translation(const IMatrix& b);
  /// (U 0; 0 U^-t) for unimodular U.
  static SymplecticMatrix basis_change(const IMatrix& u);
  /// Inversion in the single coordinate k, identity elsewhere.
  static SymplecticMatrix partial_inversion(int g, int k);

  int genus() const { return static_cast<int>(a_.rows()); }
  const IMatrix& a() const { return a_; }
  const IMatrix& b() const { return b_; }
  const IMatrix& c() const { return c_; }
  const IMatrix& d() const { return d_; }

  SymplecticMatrix operator*(const SymplecticMatrix& rhs) const;
  bool operator==(const SymplecticMatrix& other) const;

 private:
  IMatrix a_, b_, c_, d_;
};

/// A point z of C^g together with the period matrix of the torus it lives on.
struct AbelianPoint {
  PeriodMatrix tau;
  CVector z;
};

/// Membership in Igusa's group: diagonals of a^t c and b^t d are even.
bool is_in_gamma12(const SymplecticMatrix& m);

/// (z, tau) -> (((c tau + d)^t)^-1 z, (a tau + b)(c tau + d)^-1).
/// Throws IllConditioned when cond(c tau + d) exceeds 1e12.
AbelianPoint act(const SymplecticMatrix& m, const AbelianPoint& p);
PeriodMatrix act(const SymplecticMatrix& m, const PeriodMatrix& tau);

struct SiegelReduction {
  PeriodMatrix tau;        // act(gamma, input)
  SymplecticMatrix gamma;  // witness in Sp(2g, Z), not necessarily in Gamma_{1,2}
};

/// Real-part shift, LLL reduction of Im tau and (repeated) inversion of the first
/// coordinate while |tau_11| < 1.
SiegelReduction siegel_reduce(const PeriodMatrix& tau);

/// z = reduced + m + tau n with Y^-1 Im(reduced) and Re(reduced) in [-1/2, 1/2).
struct LatticeReduction {
  CVector z;
  IVector m;
  IVector n;
};

LatticeReduction reduce_modulo_lattice(const PeriodMatrix& tau, const CVector& z);

/// m + tau n.
CVector lattice_vector(const PeriodMatrix& tau, const IVector& m, const IVector& n);

/// Distance on the torus for the flat metric with Hermitian form Y^-1, minimised
/// over lattice translates.
double torus_distance(const PeriodMatrix& tau, const CVector& z1, const CVector& z2);

/// True when z lies within tol of the lattice (torus metric).
bool in_lattice(const PeriodMatrix& tau, const CVector& z, double tol);

}  // namespace thetagreen
