#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/theta.hpp"

using namespace thetagreen;

namespace {

constexpr double kThetaI = 1.0864348112133080146;  // theta(0, i)

CVector vec(std::initializer_list<cd> v) {
  CVector z(v.size());
  int i = 0;
  for (cd x : v) z(i++) = x;
  return z;
}

}  // namespace

TEST(Theta, KnownValueAtI) {
  const AbelianPoint p{PeriodMatrix::scalar(cd(0, 1)), vec({0.0})};
  const ThetaJet j = theta_jet(p, 1e-12);
  EXPECT_NEAR(j.value.real(), kThetaI, 1e-12);
  EXPECT_NEAR(j.value.imag(), 0.0, 1e-14);
  EXPECT_LT(std::abs(j.grad(0)), 1e-14);
  const cd naive = oracle::naive_theta(p.tau.tau(), p.z, 20);
  EXPECT_LT(std::abs(j.value - naive), 1e-13);
  EXPECT_LE(j.err_bound, 1e-12);
  EXPECT_NEAR(theta_norm(p), kThetaI, 1e-12);
}

TEST(Theta, MatchesBoxSumInAllGenera) {
  std::mt19937_64 rng(21);
  for (int g = 1; g <= 3; ++g)
    for (int k = 0; k < 5; ++k) {
      const PeriodMatrix t(oracle::random_tau(rng, g));
      const CVector z = oracle::random_z(rng, g);
      const ThetaJet j = theta_function(t)->jet(z, 1e-12);
      const cd ref = oracle::naive_theta(t.tau(), z, g == 3 ? 9 : 14);
      EXPECT_LT(std::abs(j.value - ref), 1e-11 * (1.0 + std::abs(ref))) << "g=" << g;
    }
}

TEST(Theta, RejectsUnreachableTolerance) {
  const AbelianPoint p{PeriodMatrix::scalar(cd(0, 1)), vec({0.0})};
  try {
    (void)theta_jet(p, 1e-15);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precision);
  }
}

TEST(Theta, EvenAndQuasiPeriodic) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> shift(-2, 2);
  for (int k = 0; k < 100; ++k) {
    const int g = 1 + k % 3;
    const PeriodMatrix t(oracle::random_tau(rng, g));
    const auto th = theta_function(t);
    const CVector z = oracle::random_z(rng, g);
    const cd v = th->jet(z, 1e-12, JetOrder::Value).value;
    const cd vm = th->jet(-z, 1e-12, JetOrder::Value).value;
    EXPECT_LT(std::abs(v - vm) / std::abs(v), 1e-9);

    IVector m(g), n(g);
    for (int i = 0; i < g; ++i) m(i) = shift(rng), n(i) = shift(rng);
    const CVector nz = n.cast<double>().cast<cd>();
    const cd factor = std::exp(cd(0, -kPi) * (nz.transpose() * t.tau() * nz).value() -
                               cd(0, 2 * kPi) * (nz.transpose() * z).value());
    const cd shifted = th->jet(z + lattice_vector(t, m, n), 1e-12, JetOrder::Value).value;
    EXPECT_LT(std::abs(shifted - factor * v) / std::abs(factor * v), 1e-9);
  }
}

TEST(Theta, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    const int g = 1 + k % 2;
    const PeriodMatrix t(oracle::random_tau(rng, g));
    const auto th = theta_function(t);
    const CVector z = oracle::random_z(rng, g);
    const ThetaJet j = th->jet(z, 1e-13);
    // Reference values: extended-precision box sums, so the O(eps/h^2) rounding
    // of the second difference stays far below the tolerance.
    auto val = [&](const CVector& w) { return oracle::naive_theta_ld(t.tau(), w, 14); };
    for (int a = 0; a < g; ++a) {
      CVector e = CVector::Zero(g);
      e(a) = h;
      const auto fdl = (val(z + e) - val(z - e)) / static_cast<long double>(2.0 * h);
      const cd fd(static_cast<double>(fdl.real()), static_cast<double>(fdl.imag()));
      EXPECT_LT(std::abs(fd - j.grad(a)), 1e-6);
      for (int b = 0; b < g; ++b) {
        CVector f = CVector::Zero(g);
        f(b) = h;
        const auto fdl2 = (val(z + e + f) - val(z + e - f) - val(z - e + f) + val(z - e - f)) /
                          static_cast<long double>(4.0 * h * h);
        const cd fd2(static_cast<double>(fdl2.real()), static_cast<double>(fdl2.imag()));
        EXPECT_LT(std::abs(fd2 - j.hess(a, b)), 1e-6);
      }
    }
    EXPECT_LT((j.hess - j.hess.transpose()).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + j.hess.cwiseAbs().maxCoeff()));
  }
}

TEST(Theta, TruncationBoundIsCertified) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 50; ++k) {
    const int g = 1 + k % 3;
    const PeriodMatrix t(oracle::random_tau(rng, g));
    const auto th = theta_function(t);
    const CVector z = oracle::random_z(rng, g);
    const ThetaJet a = th->jet(z, 1e-10);
    const ThetaJet b = th->jet_with_radius(z, 2.0 * a.radius, JetOrder::Hessian);
    EXPECT_LE(a.err_bound, 1e-10);
    EXPECT_LE(std::abs(a.value - b.value), a.err_bound);
    EXPECT_LE((a.grad - b.grad).cwiseAbs().maxCoeff(), a.err_bound);
    EXPECT_LE((a.hess - b.hess).cwiseAbs().maxCoeff(), a.err_bound);
  }
}

TEST(ThetaNorm, LatticeInvariance) {
  std::mt19937_64 rng(25);
  std::uniform_int_distribution<int> shift(-3, 3);
  for (int k = 0; k < 30; ++k) {
    const int g = 1 + k % 3;
    const PeriodMatrix t(oracle::random_tau(rng, g));
    const CVector z = oracle::random_z(rng, g);
    IVector m(g), n(g);
    for (int i = 0; i < g; ++i) m(i) = shift(rng), n(i) = shift(rng);
    const double a = theta_norm({t, z});
    const double b = theta_norm({t, z + lattice_vector(t, m, n)});
    EXPECT_LT(std::abs(a - b) / a, 1e-10);
  }
}

TEST(ThetaNorm, Gamma12Invariance) {
  std::mt19937_64 rng(26);
  for (int g = 1; g <= 2; ++g) {
    for (const SymplecticMatrix& gamma : testgen::gamma12_generators(g)) {
      for (int k = 0; k < 3; ++k) {
        const AbelianPoint p{PeriodMatrix(oracle::random_tau(rng, g, 0.8)), oracle::random_z(rng, g)};
        const double a = theta_norm(p);
        const double b = theta_norm(act(gamma, p));
        EXPECT_LT(std::abs(a - b) / a, 1e-8);
      }
    }
  }
}

TEST(ThetaNorm, ProductSplitting) {
  std::mt19937_64 rng(27);
  for (int k = 0; k < 10; ++k) {
    const CMatrix t1 = oracle::random_tau(rng, 1), t2 = oracle::random_tau(rng, 2);
    CMatrix t = CMatrix::Zero(3, 3);
    t(0, 0) = t1(0, 0);
    t.bottomRightCorner(2, 2) = t2;
    const CVector z = oracle::random_z(rng, 3);
    const cd whole = theta_jet({PeriodMatrix(t), z}, 1e-12, JetOrder::Value).value;
    const cd a = theta_jet({PeriodMatrix(t1), z.head(1)}, 1e-12, JetOrder::Value).value;
    const cd b = theta_jet({PeriodMatrix(t2), z.tail(2)}, 1e-12, JetOrder::Value).value;
    EXPECT_LT(std::abs(whole - a * b) / std::abs(whole), 1e-10);
  }
  const AbelianPoint d{PeriodMatrix::diagonal({cd(0, 1), cd(0, 1)}), vec({0.0, 0.0})};
  EXPECT_NEAR(theta_jet(d, 1e-12).value.real(), kThetaI * kThetaI, 1e-11);
}

TEST(ThetaDivisor, Membership) {
  const PeriodMatrix t1 = PeriodMatrix::scalar(cd(0, 1));
  EXPECT_TRUE(on_theta_divisor({t1, vec({cd(0.5, 0.5)})}, 1e-10));
  EXPECT_TRUE(on_theta_divisor({t1, vec({cd(2.5, 3.5)})}, 1e-10));
  EXPECT_FALSE(on_theta_divisor({t1, vec({cd(0.1, 0.2)})}, 1e-6));
  const PeriodMatrix t2 = PeriodMatrix::diagonal({cd(0, 1), cd(0, 1)});
  EXPECT_FALSE(on_theta_divisor({t2, vec({0.0, 0.0})}, 1e-6));
  EXPECT_TRUE(on_theta_divisor({t2, vec({cd(0.5, 0.5), cd(0.13, -0.4)})}, 1e-10));
  EXPECT_GT(theta_function(t2)->divisor_scale(), 0.1);
}
