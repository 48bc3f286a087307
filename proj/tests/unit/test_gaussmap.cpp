#include <gtest/gtest.h>

#include <random>

#include <Eigen/LU>

#include "generators.hpp"
#include "oracles.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"

using namespace thetagreen;

namespace {

/// Newton iteration in the first coordinate onto the theta divisor.
CVector project_to_divisor(const PeriodMatrix& t, CVector z) {
  const auto th = theta_function(t);
  for (int it = 0; it < 60; ++it) {
    const ThetaJet j = th->jet(z, 1e-13, JetOrder::Gradient);
    const cd step = j.scaled_value / j.scaled_grad(0);
    z(0) -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return z;
}

std::vector<CVector> divisor_points(std::mt19937_64& rng, const PeriodMatrix& t, int count) {
  std::vector<CVector> out;
  const auto th = theta_function(t);
  while (static_cast<int>(out.size()) < count) {
    const CVector z = project_to_divisor(t, oracle::random_z(rng, t.genus()));
    if (th->on_divisor(z, 1e-10)) out.push_back(reduce_modulo_lattice(t, z).z);
  }
  return out;
}

/// Bordered determinant with gradient and Hessian replaced by central
/// differences (fourth-order stencil, h = 1e-5) of an extended-precision box sum.
cd eta_by_differences(const PeriodMatrix& t, const CVector& z) {
  const int g = t.genus();
  const double h = 1e-5;
  using cl = std::complex<long double>;
  auto val = [&](const CVector& w) { return oracle::naive_theta_ld(t.tau(), w, 14); };
  const int offs[4] = {-2, -1, 1, 2};
  const long double wts[4] = {1.0L / 12, -8.0L / 12, 8.0L / 12, -1.0L / 12};
  auto unit = [&](int a) {
    CVector e = CVector::Zero(g);
    e(a) = h;
    return e;
  };
  auto to_cd = [](cl v) { return cd(static_cast<double>(v.real()), static_cast<double>(v.imag())); };
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g + 1, g + 1);
  for (int a = 0; a < g; ++a) {
    cl d1 = 0.0L;
    for (int i = 0; i < 4; ++i) d1 += wts[i] * val(z + static_cast<double>(offs[i]) * unit(a));
    m(a, g) = m(g, a) = to_cd(d1 / static_cast<long double>(h));
    for (int b = 0; b < g; ++b) {
      cl d2 = 0.0L;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          d2 += wts[i] * wts[j] * val(z + static_cast<double>(offs[i]) * unit(a) + static_cast<double>(offs[j]) * unit(b));
      m(a, b) = to_cd(d2 / static_cast<long double>(h * h));
    }
  }
  return m.determinant();
}

CVector vec(std::initializer_list<cd> v) {
  CVector z(v.size());
  int i = 0;
  for (cd x : v) z(i++) = x;
  return z;
}

}  // namespace

TEST(Eta, GenusOneIsMinusGradientSquared) {
  const PeriodMatrix t = PeriodMatrix::scalar(cd(0.2, 1.1));
  const CVector z = vec({cd(0.5, 0.0) + 0.5 * t.tau()(0, 0)});
  const EtaValue e = eta({t, z});
  const ThetaJet j = theta_jet({t, z}, 1e-12);
  EXPECT_LT(std::abs(e.eta + j.grad(0) * j.grad(0)), 1e-12 * std::abs(e.eta));
}

TEST(Eta, MatchesFiniteDifferenceHessian) {
  std::mt19937_64 rng(31);
  const PeriodMatrix t(oracle::random_tau(rng, 2));
  for (const CVector& z : divisor_points(rng, t, 6)) {
    const EtaValue e = eta({t, z});
    EXPECT_LT(std::abs(e.eta - eta_by_differences(t, z)), 1e-6);
  }
}

TEST(Eta, CofactorExpansionAgrees) {
  std::mt19937_64 rng(32);
  for (int g = 2; g <= 3; ++g) {
    const PeriodMatrix t(oracle::random_tau(rng, g));
    for (const CVector& z : divisor_points(rng, t, 5)) {
      const ThetaJet j = theta_jet({t, z}, 1e-12);
      const Eigen::MatrixXcd h = j.hess;
      Eigen::MatrixXcd adj(g, g);
      for (int r = 0; r < g; ++r)
        for (int c = 0; c < g; ++c) {
          Eigen::MatrixXcd minor(g - 1, g - 1);
          for (int a = 0, aa = 0; a < g; ++a) {
            if (a == c) continue;
            for (int b = 0, bb = 0; b < g; ++b) {
              if (b == r) continue;
              minor(aa, bb++) = h(a, b);
            }
            ++aa;
          }
          adj(r, c) = ((r + c) % 2 ? -1.0 : 1.0) * minor.determinant();
        }
      const Eigen::VectorXcd gr = j.grad;
      const cd cof = -(gr.transpose() * adj * gr).value();
      const cd direct = eta({t, z}).eta;
      EXPECT_LT(std::abs(cof - direct), 1e-9 * std::abs(direct));
    }
  }
}

TEST(Eta, NormFormula) {
  std::mt19937_64 rng(33);
  const PeriodMatrix t(oracle::random_tau(rng, 2));
  for (const CVector& z0 : divisor_points(rng, t, 5)) {
    IVector m(2), n(2);
    m << 1, -2;
    n << 1, 0;
    const CVector z = z0 + lattice_vector(t, m, n);
    const EtaValue e = eta({t, z});
    const RVector y = z.imag();
    const double expect = std::pow(t.im_det(), 7.0 / 4.0) * std::exp(-kPi * 3.0 * y.dot(t.im_inverse() * y)) *
                          std::abs(e.eta);
    EXPECT_LT(std::abs(expect - e.eta_norm) / e.eta_norm, 1e-12);
    // the plain value of eta agrees with a direct determinant at the shifted point
    const ThetaJet j = theta_jet({t, z}, 1e-12);
    const cd direct = Eigen::MatrixXcd(bordered_matrix(j.grad, j.hess)).determinant();
    EXPECT_LT(std::abs(direct - e.eta), 1e-8 * std::abs(e.eta));
  }
}

TEST(Eta, RequiresDivisorMembership) {
  const PeriodMatrix t = PeriodMatrix::diagonal({cd(0, 1), cd(0, 1.3)});
  try {
    (void)eta({t, vec({0.1, 0.2})});
    FAIL();
  } catch (const OffDivisorError& e) {
    EXPECT_GT(e.theta_residual(), 0.1);
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Eta, LatticeInvariance) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> shift(-2, 2);
  const PeriodMatrix t(oracle::random_tau(rng, 2));
  for (const CVector& z : divisor_points(rng, t, 50)) {
    IVector m(2), n(2);
    for (int i = 0; i < 2; ++i) m(i) = shift(rng), n(i) = shift(rng);
    const double a = eta({t, z}).eta_norm;
    const double b = eta({t, z + lattice_vector(t, m, n)}).eta_norm;
    EXPECT_LT(std::abs(a - b) / a, 1e-8);
  }
}

TEST(Eta, Gamma12Invariance) {
  std::mt19937_64 rng(35);
  const PeriodMatrix t(oracle::random_tau(rng, 2, 0.8));
  const auto points = divisor_points(rng, t, 3);
  for (const SymplecticMatrix& gamma : testgen::gamma12_generators(2)) {
    for (const CVector& z : points) {
      const AbelianPoint moved = act(gamma, AbelianPoint{t, z});
      ASSERT_TRUE(on_theta_divisor(moved, 1e-8));
      const double a = eta({t, z}).eta_norm;
      const double b = eta(moved).eta_norm;
      EXPECT_LT(std::abs(a - b) / a, 1e-7);
    }
  }
}

TEST(Eta, VanishesOnDecomposableProducts) {
  std::mt19937_64 rng(36);
  const PeriodMatrix t = PeriodMatrix::diagonal({cd(0, 1), cd(0, 2)});
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 50; ++k) {
    const CVector z = vec({cd(0.5, 0.5), cd(u(rng), 2.0 * u(rng))});
    const AbelianPoint p{t, z};
    EXPECT_LE(eta(p).eta_norm, 1e-8);
    EXPECT_TRUE(is_ramified(p, 1e-6, 0.0));
  }
}

TEST(GaussMap, Normalisation) {
  std::mt19937_64 rng(37);
  const PeriodMatrix t(oracle::random_tau(rng, 2));
  for (const CVector& z : divisor_points(rng, t, 5)) {
    const GaussPoint a = gauss_map({t, z}, 1e-12);
    const GaussPoint b = gauss_map({t, z}, 1e-9);
    EXPECT_NEAR(a.coords.norm(), 1.0, 1e-14);
    EXPECT_EQ(a.coords(0).imag(), 0.0);
    EXPECT_GT(a.coords(0).real(), 0.0);
    EXPECT_LT((a.coords - b.coords).norm(), 1e-9);
  }
  const PeriodMatrix t1 = PeriodMatrix::scalar(cd(0.1, 0.9));
  const GaussPoint p = gauss_map({t1, vec({0.5 + 0.5 * t1.tau()(0, 0)})});
  EXPECT_NEAR(std::abs(p.coords(0) - 1.0), 0.0, 1e-14);
}

TEST(GaussMap, SingularPointRejected) {
  // theta(z1,z2) = theta(z1) theta(z2) for diagonal tau: the point where both
  // factors vanish is a singular point of the divisor.
  const PeriodMatrix t = PeriodMatrix::diagonal({cd(0, 1), cd(0, 1.5)});
  try {
    (void)gauss_map({t, vec({cd(0.5, 0.5), cd(0.5, 0.75)})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singular);
  }
}
