#include "thetagreen/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include <json.hpp>

#include "arakelov_internal.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"

namespace thetagreen {

using ojson = nlohmann::ordered_json;

void RunConfig::validate() const {
  if (!(eps >= 1e-13 && eps <= 1e-6)) fail(ErrorKind::InvalidInput, "eps must lie in [1e-13, 1e-6]");
  if (samples < 1) fail(ErrorKind::InvalidInput, "samples must be at least 1");
  if (refine < 0) fail(ErrorKind::InvalidInput, "refine must be non-negative");
  quadrature().validate();
}

QuadratureConfig RunConfig::quadrature() const { return QuadratureConfig{seed, nodes, 2 + refine}; }

std::array<cd, 6> load_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open curve file " + path);
  ojson j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("curve file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("f_coeffs") || !j["f_coeffs"].is_array())
    fail(ErrorKind::InvalidInput, "curve file needs an f_coeffs array");
  const ojson& arr = j["f_coeffs"];
  if (arr.size() != 5 && arr.size() != 6) fail(ErrorKind::InvalidInput, "f_coeffs must list c0..c4 or c0..c5");
  std::array<cd, 6> c{};
  c[5] = 1.0;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const ojson& e = arr[k];
    if (e.is_number()) {
      c[k] = e.get<double>();
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      c[k] = cd(e[0].get<double>(), e[1].get<double>());
    } else {
      fail(ErrorKind::InvalidInput, "each coefficient must be a number or [re, im]");
    }
  }
  return c;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Domain:
    case ErrorKind::Unsupported:
      return 2;
    default:
      return 3;
  }
}

bool VerificationReport::all_pass() const {
  if (stage != "complete") return false;
  for (const SuiteResult& s : suites)
    if (!s.pass) return false;
  return true;
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Samples admissible points, retrying those an evaluation rejects as excluded.
template <class Eval>
void sample_rows(const CurveModel& c, std::mt19937_64& rng, int count, Eval&& eval) {
  int done = 0;
  int attempts = 0;
  while (done < count) {
    if (++attempts > 20 * count + 20) fail(ErrorKind::NonConvergence, "too many excluded sample points");
    const CurvePoint p = random_curve_point(c, rng, 1.2, 0.1);
    try {
      eval(p, done);
      ++done;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain) throw;
    }
  }
}

void finish_max_abs(SuiteResult& s) {
  s.statistic = "max |residual|";
  s.value = 0.0;
  for (const ResidualRow& r : s.rows) s.value = std::max(s.value, std::abs(r.residual));
  s.pass = std::isfinite(s.value) && s.value <= s.tolerance;
}

ojson complex_json(cd z) { return ojson::array({z.real(), z.imag()}); }

}  // namespace

VerificationReport run_verification(const RunConfig& config) {
  VerificationReport rep;
  using clock = std::chrono::steady_clock;
  auto stage_start = clock::now();
  auto mark = [&](const std::string& name) {
    const auto now = clock::now();
    rep.timings.emplace_back(name, std::chrono::duration<double>(now - stage_start).count());
    stage_start = now;
  };

  try {
    rep.stage = "input";
    config.validate();
    rep.f_coeffs = load_curve_file(config.curve_file);

    rep.stage = "build";
    const CurveModel c = build_curve(rep.f_coeffs);
    rep.branch_points = c.branch_points();
    rep.tau = c.tau().tau();
    rep.kappa = c.riemann_constant();
    mark("build");

    rep.stage = "bost_constant";
    const QuadratureConfig q = config.quadrature();
    const GreenEvaluator ge(c, q);
    mark("bost_constant");

    rep.stage = "invariants";
    rep.invariants = compute_invariants(c, ge, 5);
    const CurveInvariants& inv = rep.invariants;
    mark("invariants");

    auto run_suite = [&](const std::string& name, double tol, const std::function<void(SuiteResult&)>& body) {
      rep.stage = name;
      const auto t0 = clock::now();
      SuiteResult s;
      s.name = name;
      s.tolerance = tol;
      body(s);
      s.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      rep.suites.push_back(std::move(s));
      mark(name);
    };

    run_suite("bost_constant_crosscheck", tolerance::kNested, [&](SuiteResult& s) {
      s.rows.push_back({"A", 0.0, inv.bost_A, inv.bost_A_crosscheck, inv.bost_A - inv.bost_A_crosscheck});
      finish_max_abs(s);
    });

    run_suite("delta_spread", tolerance::kDeltaSpread, [&](SuiteResult& s) {
      s.rows.push_back({"delta", 0.0, inv.delta, inv.delta, 0.0});
      s.statistic = "spread / (1 + |delta|)";
      s.value = inv.delta_spread / (1.0 + std::abs(inv.delta));
      s.pass = std::isfinite(s.value) && s.value <= s.tolerance;
    });

    run_suite("green_normalization", tolerance::kSingleIntegral, [&](SuiteResult& s) {
      std::mt19937_64 rng(stream_seed(config.seed, 1));
      sample_rows(c, rng, std::min(3, config.samples), [&](const CurvePoint& p, int k) {
        const Estimate m = mean_log_green(ge, p);
        s.rows.push_back({"P" + std::to_string(k), double(k), m.value, 0.0, m.value});
      });
      finish_max_abs(s);
    });

    run_suite("lambda_constancy", tolerance::kLambdaRelStd, [&](SuiteResult& s) {
      std::mt19937_64 rng(stream_seed(config.seed, 2));
      const DivisorOnCurve d{{random_curve_point(c, rng, 1.2, 0.1)}};
      std::vector<double> v;
      for (int k = 0; k < config.samples; ++k) {
        const CurvePoint r = random_curve_point(c, rng, 1.2, 0.1);
        const CurvePoint t = random_curve_point(c, rng, 1.2, 0.1);
        v.push_back(lambda_norm(c, ge, d, r, t));
      }
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= v.size();
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
      for (std::size_t k = 0; k < v.size(); ++k)
        s.rows.push_back({"pair" + std::to_string(k), double(k), v[k], mean, v[k] - mean});
      s.statistic = "relative standard deviation";
      s.value = sd / mean;
      s.pass = std::isfinite(s.value) && s.value <= s.tolerance;
    });

    run_suite("main_theorem", tolerance::kNested, [&](SuiteResult& s) {
      std::mt19937_64 rng(stream_seed(config.seed, 3));
      sample_rows(c, rng, config.samples, [&](const CurvePoint& p, int k) {
        const DivisorOnCurve d{{p}};
        const double res = verify_main_theorem(c, ge, inv, d);
        const double lhs = eta(divisor_to_theta_point(c, d), config.eps).log_eta_norm;
        s.rows.push_back({"D" + std::to_string(k), double(k), lhs, lhs - res, res});
      });
      finish_max_abs(s);
    });

    run_suite("wronskian_lemma", tolerance::kExtrapolated, [&](SuiteResult& s) {
      std::mt19937_64 rng(stream_seed(config.seed, 4));
      sample_rows(c, rng, std::max(1, config.samples / 2), [&](const CurvePoint& p, int k) {
        const double res = verify_wronskian_lemma(c, ge, inv, p);
        const double lhs = eta(divisor_to_theta_point(c, DivisorOnCurve{{p}}), config.eps).log_eta_norm;
        s.rows.push_back({"P" + std::to_string(k), double(k), lhs, lhs - res, res});
      });
      finish_max_abs(s);
    });

    rep.stage = "complete";
    rep.exit_code = rep.all_pass() ? 0 : 1;
  } catch (const Error& e) {
    rep.error = std::string(to_string(e.kind())) + ": " + e.what();
    rep.exit_code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    rep.error = e.what();
    rep.exit_code = 3;
  }
  return rep;
}

namespace {

// Rounds to 12 significant digits so the text form does not depend on the
// last bits of floating-point reductions.
double stable(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return std::stod(os.str());
}

ojson stable_complex(cd z) { return complex_json(cd(stable(z.real()), stable(z.imag()))); }

}  // namespace

std::string report_json(const VerificationReport& r) {
  ojson j;
  ojson curve;
  curve["f_coeffs"] = ojson::array();
  for (cd v : r.f_coeffs) curve["f_coeffs"].push_back(stable_complex(v));
  curve["branch_points"] = ojson::array();
  for (cd v : r.branch_points) curve["branch_points"].push_back(stable_complex(v));
  curve["tau"] = ojson::array();
  for (int i = 0; i < r.tau.rows(); ++i) {
    ojson row = ojson::array();
    for (int k = 0; k < r.tau.cols(); ++k) row.push_back(stable_complex(r.tau(i, k)));
    curve["tau"].push_back(row);
  }
  curve["kappa"] = ojson::array();
  for (int i = 0; i < r.kappa.size(); ++i) curve["kappa"].push_back(stable_complex(r.kappa(i)));
  j["curve"] = curve;

  const CurveInvariants& v = r.invariants;
  j["invariants"] = {
      {"delta", stable(v.delta)},
      {"delta_spread", stable(v.delta_spread)},
      {"bost_A", stable(v.bost_A)},
      {"bost_A_error", stable(v.bost_A_error)},
      {"bost_A_crosscheck", stable(v.bost_A_crosscheck)},
      {"bost_A_crosscheck_error", stable(v.bost_A_crosscheck_error)},
      {"eta_integral", stable(v.eta_integral)},
      {"eta_integral_error", stable(v.eta_integral_error)},
  };

  j["suites"] = ojson::array();
  for (const SuiteResult& s : r.suites) {
    ojson sj;
    sj["name"] = s.name;
    sj["statistic"] = s.statistic;
    sj["value"] = stable(s.value);
    sj["tolerance"] = s.tolerance;
    sj["pass"] = s.pass;
    sj["residuals"] = ojson::array();
    for (const ResidualRow& row : s.rows)
      sj["residuals"].push_back({{"label", row.label},
                                 {"parameter", row.parameter},
                                 {"lhs", stable(row.lhs)},
                                 {"rhs", stable(row.rhs)},
                                 {"residual", stable(row.residual)},
                                 {"tolerance", s.tolerance}});
    j["suites"].push_back(sj);
  }
  j["stage"] = r.stage;
  j["error"] = r.error;
  j["pass"] = r.all_pass();
  j["exit_code"] = r.exit_code;
  return j.dump(2) + "\n";
}

std::string timings_json(const VerificationReport& r) {
  ojson j = ojson::object();
  for (const auto& [name, sec] : r.timings) j[name] = sec;
  return j.dump(2) + "\n";
}

std::string report_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "divisor,log_eta_norm,log_rhs,residual,tolerance\n";
  for (const SuiteResult& s : r.suites) {
    if (s.name != "main_theorem") continue;
    for (const ResidualRow& row : s.rows)
      os << row.parameter << ',' << stable(row.lhs) << ',' << stable(row.rhs) << ',' << stable(row.residual) << ','
         << s.tolerance << '\n';
  }
  return os.str();
}

}  // namespace thetagreen
