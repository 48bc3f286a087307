#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/siegel.hpp"
#include "thetagreen/theta.hpp"

using namespace thetagreen;

namespace {

double rel_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

IMatrix imat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IMatrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto r : rows) {
    int j = 0;
    for (auto v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST(PeriodMatrix, RejectsAsymmetricInput) {
  CMatrix t(2, 2);
  t << cd(0, 1), 0.3, 0.1, cd(0, 1);
  EXPECT_THROW(PeriodMatrix{t}, Error);
}

TEST(PeriodMatrix, RejectsIndefiniteImaginaryPart) {
  CMatrix t(2, 2);
  t << cd(0, 1), cd(0, 2), cd(0, 2), cd(0, 1);
  try {
    PeriodMatrix p(t);
    FAIL() << "accepted indefinite Y";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(PeriodMatrix, CholeskyReproducesY) {
  std::mt19937_64 rng(1);
  const PeriodMatrix p(oracle::random_tau(rng, 3));
  const RMatrix& t = p.im_cholesky();
  EXPECT_LT((t.transpose() * t - p.im()).norm(), 1e-13);
  EXPECT_LT((p.im() * p.im_inverse() - RMatrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Symplectic, ValidationIsExact) {
  EXPECT_THROW(SymplecticMatrix(imat({{1}}), imat({{1}}), imat({{1}}), imat({{1}})), Error);
  EXPECT_NO_THROW(SymplecticMatrix(imat({{2}}), imat({{1}}), imat({{1}}), imat({{1}})));
  const std::int64_t big = std::int64_t{1} << 62;
  EXPECT_THROW(SymplecticMatrix(imat({{big}}), imat({{big}}), imat({{big}}), imat({{big}})), Error);
}

TEST(Symplectic, Gamma12Membership) {
  EXPECT_TRUE(is_in_gamma12(SymplecticMatrix::identity(2)));
  EXPECT_TRUE(is_in_gamma12(SymplecticMatrix::inversion(2)));
  EXPECT_FALSE(is_in_gamma12(SymplecticMatrix(imat({{1}}), imat({{0}}), imat({{1}}), imat({{1}}))));
}

TEST(Symplectic, Gamma12ClosedUnderProducts) {
  std::mt19937_64 rng(7);
  for (int g = 1; g <= 2; ++g) {
    const auto gens = testgen::gamma12_generators(g);
    for (int k = 0; k < 50; ++k) {
      const SymplecticMatrix a = testgen::random_word(rng, gens, 4);
      const SymplecticMatrix b = testgen::random_word(rng, gens, 4);
      ASSERT_TRUE(is_in_gamma12(a));
      ASSERT_TRUE(is_in_gamma12(a * b));
    }
  }
}

TEST(Action, IdentityAndFixedPoint) {
  const PeriodMatrix t = PeriodMatrix::scalar(cd(0, 1));
  CVector z(1);
  z << cd(0.3, 0.2);
  const AbelianPoint p{t, z};
  const AbelianPoint q = act(SymplecticMatrix::identity(1), p);
  EXPECT_LT(std::abs(q.z(0) - z(0)), 1e-15);
  const AbelianPoint r = act(SymplecticMatrix::inversion(1), p);
  EXPECT_LT(std::abs(r.tau.tau()(0, 0) - cd(0, 1)), 1e-14);
  EXPECT_LT(std::abs(r.z(0) - z(0) / cd(0, 1)), 1e-14);
}

TEST(Action, IsAGroupAction) {
  std::mt19937_64 rng(11);
  int cases = 0;
  for (int g = 1; g <= 2; ++g) {
    const auto gens = testgen::sp_generators(g);
    for (int k = 0; k < 25; ++k, ++cases) {
      const SymplecticMatrix m1 = testgen::random_word(rng, gens, 3);
      const SymplecticMatrix m2 = testgen::random_word(rng, gens, 3);
      const AbelianPoint p{PeriodMatrix(oracle::random_tau(rng, g)), oracle::random_z(rng, g)};
      const AbelianPoint lhs = act(m1 * m2, p);
      const AbelianPoint rhs = act(m1, act(m2, p));
      EXPECT_LT(rel_diff(lhs.tau.tau(), rhs.tau.tau()), 1e-10);
      EXPECT_LT((lhs.z - rhs.z).norm() / (1.0 + rhs.z.norm()), 1e-10);
    }
  }
  EXPECT_EQ(cases, 50);
}

TEST(Action, IllConditionedIsReported) {
  // c tau + d = tau - 1 is nearly singular for tau close to 1.
  const PeriodMatrix t = PeriodMatrix::scalar(cd(1.0, 1e-14));
  try {
    (void)act(SymplecticMatrix(imat({{0}}), imat({{-1}}), imat({{1}}), imat({{-1}})), t);
    FAIL() << "near-singular automorphy factor accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
  }
}

TEST(Reduction, AlreadyReducedIsUnchanged) {
  const PeriodMatrix t = PeriodMatrix::diagonal({cd(0, 1), cd(0, 1)});
  const SiegelReduction r = siegel_reduce(t);
  EXPECT_TRUE(r.gamma == SymplecticMatrix::identity(2));
  EXPECT_LT(rel_diff(r.tau.tau(), t.tau()), 1e-15);
}

TEST(Reduction, RealShift) {
  const SiegelReduction r = siegel_reduce(PeriodMatrix::scalar(cd(5, 1)));
  EXPECT_LT(std::abs(r.tau.tau()(0, 0) - cd(0, 1)), 1e-14);
  EXPECT_TRUE(r.gamma == SymplecticMatrix::translation(imat({{-5}})));
}

TEST(Reduction, OutputInvariantsOnScrambledInput) {
  std::mt19937_64 rng(3);
  for (int g = 1; g <= 3; ++g) {
    const auto gens = testgen::sp_generators(g);
    for (int k = 0; k < 20; ++k) {
      const PeriodMatrix nice(oracle::random_tau(rng, g));
      PeriodMatrix messy = nice;
      try {
        messy = act(testgen::random_word(rng, gens, 6), nice);
      } catch (const Error&) {
        continue;
      }
      const SiegelReduction r = siegel_reduce(messy);
      EXPECT_LE(r.tau.re().cwiseAbs().maxCoeff(), 0.5 + 1e-12);
      EXPECT_GE(std::abs(r.tau.tau()(0, 0)), 1.0 - 1e-9);
      EXPECT_LT(rel_diff(act(r.gamma, messy).tau(), r.tau.tau()), 1e-9);
    }
  }
}

// The norm of theta at the transformed point equals the norm of one of the
// half-integer-characteristic thetas of the original point. The reference is a
// brute-force box sum at the unreduced (slowly converging) period matrix.
TEST(Reduction, ThetaTransformationLaw) {
  std::mt19937_64 rng(5);
  const auto gens = testgen::sp_generators(2);
  int checked = 0;
  for (int k = 0; k < 10; ++k) {
    const PeriodMatrix nice(oracle::random_tau(rng, 2, 0.9));
    PeriodMatrix messy = nice;
    try {
      messy = act(testgen::random_word(rng, gens, 3), nice);
    } catch (const Error&) {
      continue;
    }
    if (messy.im_min_eigenvalue() < 0.15) continue;  // keep the box sum tractable
    const CVector z = oracle::random_z(rng, 2, 0.3);
    const SiegelReduction r = siegel_reduce(messy);
    const AbelianPoint moved = act(r.gamma, AbelianPoint{messy, z});
    const double lhs = theta_norm(moved);

    const double pref = std::pow(messy.im_det(), 0.25) *
                        std::exp(-kPi * z.imag().dot(messy.im_inverse() * z.imag()));
    double best = 1e300;
    for (int c = 0; c < 16; ++c) {
      Eigen::VectorXd a(2), b(2);
      a << 0.5 * (c & 1), 0.5 * ((c >> 1) & 1);
      b << 0.5 * ((c >> 2) & 1), 0.5 * ((c >> 3) & 1);
      // The modulus factors relating theta[a,b](z) to theta(z + b + tau a)
      // cancel inside the norm, so the characteristic norm is pref * |theta[a,b]|.
      const double norm_char = pref * std::abs(oracle::naive_theta(messy.tau(), z, 28, a, b));
      best = std::min(best, std::abs(norm_char - lhs) / lhs);
    }
    EXPECT_LT(best, 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 3);
}

TEST(Lattice, ReductionDecomposesPoint) {
  std::mt19937_64 rng(9);
  for (int g = 1; g <= 3; ++g) {
    const PeriodMatrix t(oracle::random_tau(rng, g));
    const CVector z = oracle::random_z(rng, g, 4.0);
    const LatticeReduction r = reduce_modulo_lattice(t, z);
    EXPECT_LT((r.z + lattice_vector(t, r.m, r.n) - z).norm(), 1e-12);
    const RVector c = t.im_inverse() * r.z.imag();
    EXPECT_LE(c.cwiseAbs().maxCoeff(), 0.5 + 1e-12);
    EXPECT_LE(r.z.real().cwiseAbs().maxCoeff(), 0.5 + 1e-12);
    EXPECT_TRUE(in_lattice(t, lattice_vector(t, r.m, r.n), 1e-10));
    EXPECT_LT(torus_distance(t, z, r.z), 1e-10);
  }
}
