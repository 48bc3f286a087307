// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "thetagreen/arakelov.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"
#include "thetagreen/report.hpp"

using namespace thetagreen;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = clock_type::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

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

cd to_cd(std::complex<long double> v) { return {static_cast<double>(v.real()), static_cast<double>(v.imag())}; }

std::vector<CurvePoint> generic_points(const CurveModel& c, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CurvePoint> out;
  for (int i = 0; i < n; ++i) out.push_back(random_curve_point(c, rng, 1.2, 0.1));
  return out;
}

}  // namespace

int main() {
  const auto run_start = clock_type::now();
  std::printf("acceptance run on y^2 = x^5 - x and random quintics\n");

  criterion(1, "theta kernel", [](Outcome& o) {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> shift(-2, 2);
    double worst_sym = 0.0;
    for (int k = 0; k < 100; ++k) {
      const int g = 1 + k % 3;
      const PeriodMatrix t(oracle::random_tau(rng, g));
      const auto th = theta_function(t);
      const CVector z = oracle::random_z(rng, g);
      const cd v = th->jet(z, 1e-12, JetOrder::Value).value;
      worst_sym = std::max(worst_sym, std::abs(v - th->jet(-z, 1e-12, JetOrder::Value).value) / std::abs(v));
      IVector m(g), n(g);
      for (int i = 0; i < g; ++i) m(i) = shift(rng), n(i) = shift(rng);
      const CVector nz = n.cast<double>().cast<cd>();
      const cd factor = std::exp(cd(0, -kPi) * (nz.transpose() * t.tau() * nz).value() -
                                 cd(0, 2 * kPi) * (nz.transpose() * z).value());
      const cd shifted = th->jet(z + lattice_vector(t, m, n), 1e-12, JetOrder::Value).value;
      worst_sym = std::max(worst_sym, std::abs(shifted - factor * v) / std::abs(factor * v));
    }
    double worst_fd = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k) {
      const int g = 1 + k % 2;
      const PeriodMatrix t(oracle::random_tau(rng, g));
      const CVector z = oracle::random_z(rng, g);
      const ThetaJet j = theta_function(t)->jet(z, 1e-13);
      auto val = [&](const CVector& w) { return oracle::naive_theta_ld(t.tau(), w, 14); };
      for (int a = 0; a < g; ++a) {
        CVector e = CVector::Zero(g);
        e(a) = h;
        worst_fd = std::max(worst_fd, std::abs(to_cd((val(z + e) - val(z - e)) / (2.0L * h)) - j.grad(a)));
        for (int b = 0; b < g; ++b) {
          CVector f = CVector::Zero(g);
          f(b) = h;
          const auto d2 = (val(z + e + f) - val(z + e - f) - val(z - e + f) + val(z - e - f)) / (4.0L * h * h);
          worst_fd = std::max(worst_fd, std::abs(to_cd(d2) - j.hess(a, b)));
        }
      }
    }
    const double secs = seconds_since(t0);
    o.detail << " periodicity/evenness " << worst_sym << ", derivatives vs differences " << worst_fd;
    o.require(worst_sym <= 1e-9, "relative residual <= 1e-9");
    o.require(worst_fd <= 1e-6, "derivative error <= 1e-6");
    o.require(secs < 10.0, "runtime < 10 s");
  });

  criterion(2, "invariance", [](Outcome& o) {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<int> shift(-3, 3);
    double lat = 0.0, mod = 0.0;
    for (int g = 1; g <= 2; ++g) {
      for (int k = 0; k < 20; ++k) {
        const PeriodMatrix t(oracle::random_tau(rng, g));
        const CVector z = oracle::random_z(rng, g);
        IVector m(g), n(g);
        for (int i = 0; i < g; ++i) m(i) = shift(rng), n(i) = shift(rng);
        const double a = theta_norm({t, z});
        lat = std::max(lat, std::abs(theta_norm({t, z + lattice_vector(t, m, n)}) - a) / a);
      }
      const PeriodMatrix t(oracle::random_tau(rng, g));
      for (const CVector& z : divisor_points(rng, t, 20)) {
        IVector m(g), n(g);
        for (int i = 0; i < g; ++i) m(i) = shift(rng), n(i) = shift(rng);
        const double a = eta({t, z}).eta_norm;
        lat = std::max(lat, std::abs(eta({t, z + lattice_vector(t, m, n)}).eta_norm - a) / a);
      }
      const PeriodMatrix tm(oracle::random_tau(rng, g, 0.8));
      const auto pts = divisor_points(rng, tm, 3);
      for (const SymplecticMatrix& gamma : testgen::gamma12_generators(g)) {
        for (const CVector& z : pts) {
          const AbelianPoint p{tm, z};
          const AbelianPoint moved = act(gamma, p);
          const double a = eta(p).eta_norm;
          mod = std::max(mod, std::abs(eta(moved).eta_norm - a) / a);
          const AbelianPoint q{tm, oracle::random_z(rng, g)};
          const double b = theta_norm(q);
          mod = std::max(mod, std::abs(theta_norm(act(gamma, q)) - b) / b);
        }
      }
    }
    const double secs = seconds_since(t0);
    o.detail << " lattice " << lat << ", Igusa group " << mod;
    o.require(lat <= 1e-8, "lattice <= 1e-8");
    o.require(mod <= 1e-7, "Igusa group <= 1e-7");
    o.require(secs < 30.0, "runtime < 30 s");
  });

  criterion(3, "decomposable degeneration", [](Outcome& o) {
    const PeriodMatrix t = PeriodMatrix::diagonal({cd(0, 1), cd(0, 2)});
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      CVector z(2);
      // half period in the first factor: theta_1 vanishes there
      z << cd(0.5, 0.5), cd(u(rng), 2.0 * u(rng));
      const AbelianPoint p{t, z};
      o.require(theta_jet(p, 1e-13, JetOrder::Gradient).grad.norm() > 1e-6, "smooth point");
      worst = std::max(worst, eta(p).eta_norm);
    }
    o.detail << " max ||eta|| over 50 points " << worst;
    o.require(worst <= 1e-8, "||eta|| <= 1e-8");
  });

  const CurveModel x5 = build_curve(std::vector<cd>{0.0, -1.0, 0.0, 0.0, 0.0});

  criterion(4, "curve geometry", [&](Outcome& o) {
    const auto t0 = clock_type::now();
    const CMatrix& t = x5.tau().tau();
    const double sym = (t - t.transpose()).cwiseAbs().maxCoeff();
    const double ymin = x5.tau().im_min_eigenvalue();
    const NuIntegral mass = integrate_nu(x5, [](const CurveSample&) { return 1.0; }, QuadratureConfig{});
    std::mt19937_64 rng(104);
    double pull = 0.0;
    for (int k = 0; k < 50; ++k) {
      const CurvePoint p = random_curve_point(x5, rng);
      const double nu = nu_density(x5, p);
      pull = std::max(pull, std::abs(pullback_mu_density(x5, p) - 2.0 * nu) / nu);
    }
    const double scale = x5.theta().divisor_scale();
    double audit = 0.0;
    for (int k = 0; k < 200; ++k) {
      const DivisorOnCurve d{{random_curve_point(x5, rng, 2.5, 1e-3)}};
      audit = std::max(audit, theta_norm(divisor_to_theta_point(x5, d)) / scale);
    }
    const double secs = seconds_since(t0);
    o.detail << " asymmetry " << sym << ", min eig Im tau " << ymin << ", nu mass " << mass.value
             << ", pullback " << pull << ", audit " << audit;
    o.require(sym <= 1e-10, "tau symmetric");
    o.require(ymin > 0.0, "Im tau positive");
    o.require(std::abs(mass.value - 1.0) <= 1e-3, "nu mass 1 +- 1e-3");
    o.require(pull <= 1e-6, "pullback = g nu");
    o.require(audit <= 1e-5, "divisor audit");
    o.require(secs < 120.0, "runtime < 2 min");
  });

  criterion(5, "ramification locus", [&](Outcome& o) {
    std::vector<cd> c04 = {0.3, cd(0.2, -0.1), -0.7, 0.1, 0.25};
    for (const CurveModel& c : {x5, build_curve(c04)}) {
      const EtaSweep sweep = eta_zero_sweep(c);
      std::vector<int> hits(6, 0);
      double worst = 0.0;
      for (const EtaZero& z : sweep.zeros) {
        if (z.weierstrass_index >= 0 && z.weierstrass_index < 6) ++hits[z.weierstrass_index];
        worst = std::max(worst, z.distance_to_weierstrass);
      }
      bool once = sweep.zeros.size() == 6;
      for (int h : hits) once = once && h == 1;
      o.detail << " zeros " << sweep.zeros.size() << " max distance " << worst << ";";
      o.require(once, "each Weierstrass image exactly once");
      o.require(worst <= 1e-4, "distance <= 1e-4");
    }
  });

  // Criteria 6 to 10 share the default verification pipeline.
  RunConfig cfg;
  cfg.curve_file = THETAGREEN_X5_CURVE;
  const auto pipeline_start = clock_type::now();
  const VerificationReport rep = run_verification(cfg);
  const double pipeline_secs = seconds_since(pipeline_start);
  std::printf("pipeline: stage %s, exit %d, %.1f s%s%s\n", rep.stage.c_str(), rep.exit_code, pipeline_secs,
              rep.error.empty() ? "" : ", error ", rep.error.c_str());
  auto suite = [&](const std::string& name) -> const SuiteResult* {
    for (const SuiteResult& s : rep.suites)
      if (s.name == name) return &s;
    return nullptr;
  };
  auto require_suite = [&](Outcome& o, const std::string& name) {
    const SuiteResult* s = suite(name);
    if (!s) {
      o.require(false, name + " did not run");
      return;
    }
    o.detail << " " << name << " " << s->statistic << " " << s->value << " (tol " << s->tolerance << ");";
    o.require(s->pass, name);
  };

  std::optional<GreenEvaluator> ge;
  if (rep.stage == "complete")
    ge.emplace(x5, cfg.quadrature(), Estimate{rep.invariants.bost_A, rep.invariants.bost_A_error});

  criterion(6, "Green's function", [&](Outcome& o) {
    require_suite(o, "green_normalization");
    if (!ge) {
      o.require(false, "pipeline incomplete");
      return;
    }
    const auto pts = generic_points(x5, 20, 106);
    double sym = 0.0;
    for (int i = 0; i < 10; ++i)
      sym = std::max(sym, std::abs(ge->log_green(pts[2 * i], pts[2 * i + 1]) - ge->log_green(pts[2 * i + 1], pts[2 * i])));
    double ratio = 0.0;
    const auto rp = generic_points(x5, 12, 107);
    for (int i = 0; i < 3; ++i) {
      const CurvePoint &p1 = rp[4 * i], &p2 = rp[4 * i + 1], &q = rp[4 * i + 2], &q2 = rp[4 * i + 3];
      const double lhs = ge->log_green(p1, q) + ge->log_green(p2, q) - ge->log_green(p1, q2) - ge->log_green(p2, q2);
      const CVector base = abel_jacobi_vector(x5, p1) + abel_jacobi_vector(x5, p2) - x5.riemann_constant();
      const double rhs = x5.theta().log_norm(base - abel_jacobi_vector(x5, q)) -
                         x5.theta().log_norm(base - abel_jacobi_vector(x5, q2));
      ratio = std::max(ratio, std::abs(lhs - rhs));
    }
    double lap = 0.0;
    const auto lp = generic_points(x5, 11, 108);
    for (int i = 1; i <= 10; ++i) {
      const double value = laplacian_log_green(*ge, lp[0], lp[i]);
      const double expected = -2.0 * kPi * nu_density(x5, lp[i]);
      lap = std::max(lap, std::abs(value / expected - 1.0));
    }
    o.detail << " symmetry " << sym << ", ratio oracle " << ratio << ", Laplacian relative " << lap;
    o.require(sym <= 2e-2, "symmetry <= 2e-2");
    o.require(ratio <= 2e-2, "ratio <= 2e-2");
    o.require(lap <= 5e-2, "Laplacian <= 5e-2");
  });

  criterion(7, "Bost's constant two ways", [&](Outcome& o) {
    o.detail << " A " << rep.invariants.bost_A << " +- " << rep.invariants.bost_A_error << ", via Lambda "
             << rep.invariants.bost_A_crosscheck << ";";
    require_suite(o, "bost_constant_crosscheck");
  });

  criterion(8, "delta well defined", [&](Outcome& o) {
    o.detail << " delta " << rep.invariants.delta << ", spread " << rep.invariants.delta_spread << ";";
    require_suite(o, "delta_spread");
  });

  criterion(9, "Lambda constancy", [&](Outcome& o) {
    const SuiteResult* s = suite("lambda_constancy");
    o.require(s && s->rows.size() == 20, "20 probe pairs");
    require_suite(o, "lambda_constancy");
  });

  criterion(10, "main theorem and Wronskian lemma", [&](Outcome& o) {
    const SuiteResult* m = suite("main_theorem");
    const SuiteResult* w = suite("wronskian_lemma");
    o.require(m && m->rows.size() == 20, "20 admissible divisors");
    o.require(w && w->rows.size() == 10, "10 generic points");
    require_suite(o, "main_theorem");
    require_suite(o, "wronskian_lemma");
    o.detail << " pipeline " << pipeline_secs << " s";
    o.require(rep.stage == "complete", "pipeline complete");
    o.require(pipeline_secs < 600.0, "pipeline < 10 min");
  });

  criterion(11, "eta integral", [&](Outcome& o) {
    QuadratureConfig q = cfg.quadrature();
    const Estimate base = eta_invariant(x5, q);
    q.refinement_levels += 1;
    const Estimate fine = eta_invariant(x5, q);
    o.detail << " value " << base.value << " (error " << base.error << "), refined " << fine.value;
    o.require(std::isfinite(base.value) && std::isfinite(fine.value), "finite");
    o.require(std::abs(fine.value - base.value) <= 2e-2, "refinement change <= 2e-2");
    o.require(base.error <= 2e-2, "level spread <= 2e-2");
  });

  std::printf("%d of 11 criteria failed; total %.1f s\n", failures, seconds_since(run_start));
  return failures == 0 ? 0 : 1;
}
