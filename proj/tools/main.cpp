#include <cmath>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thetagreen/arakelov.hpp"
#include "thetagreen/errors.hpp"
#include "thetagreen/gaussmap.hpp"
#include "thetagreen/report.hpp"

using namespace thetagreen;
using ojson = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

// Accepts "1.5", "-2i", "i", "0.3-1.2i", "1e-3+2e-1i".
cd parse_complex(const std::string& raw) {
  const std::string s = trim(raw);
  static const std::regex num(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex imag(R"(([+-]?)((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?i)");
  static const std::regex both(R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?i)");
  std::smatch m;
  if (std::regex_match(s, m, num)) return {std::stod(s), 0.0};
  if (std::regex_match(s, m, imag)) {
    const double mag = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return {0.0, m[1].str() == "-" ? -mag : mag};
  }
  if (std::regex_match(s, m, both)) {
    const double mag = m[3].matched ? std::stod(m[3].str()) : 1.0;
    return {std::stod(m[1].str()), m[2].str() == "-" ? -mag : mag};
  }
  fail(ErrorKind::InvalidInput, "cannot parse complex number '" + raw + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// "a" (genus 1), "diag(a,b,...)", or rows "a,b;c,d".
PeriodMatrix parse_tau(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.rfind("diag(", 0) == 0 && s.back() == ')') {
    const auto parts = split(s.substr(5, s.size() - 6), ',');
    CMatrix t = CMatrix::Zero(parts.size(), parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) t(k, k) = parse_complex(parts[k]);
    return PeriodMatrix(t);
  }
  const auto rows = split(s, ';');
  const int g = static_cast<int>(rows.size());
  CMatrix t(g, g);
  for (int r = 0; r < g; ++r) {
    const auto cols = split(rows[r], ',');
    if (static_cast<int>(cols.size()) != g) fail(ErrorKind::InvalidInput, "tau must be square");
    for (int k = 0; k < g; ++k) t(r, k) = parse_complex(cols[k]);
  }
  return PeriodMatrix(t);
}

CVector parse_vector(const std::string& raw, int g) {
  const auto parts = split(raw, ',');
  if (static_cast<int>(parts.size()) != g) fail(ErrorKind::InvalidInput, "z must have genus-many entries");
  CVector z(g);
  for (int k = 0; k < g; ++k) z(k) = parse_complex(parts[k]);
  return z;
}

// "inf" or "x:sheet" with sheet +1 or -1 (default +1).
CurvePoint parse_point(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf") return CurvePoint::infinity();
  const auto parts = split(s, ':');
  int sheet = 1;
  if (parts.size() == 2) {
    sheet = std::stoi(parts[1]);
    if (sheet != 1 && sheet != -1) fail(ErrorKind::InvalidInput, "sheet must be 1 or -1");
  } else if (parts.size() != 1) {
    fail(ErrorKind::InvalidInput, "a point is 'inf' or 'x:sheet'");
  }
  return CurvePoint::finite(parse_complex(parts[0]), sheet);
}

ojson cjson(cd z) { return ojson::array({z.real(), z.imag()}); }

ojson vjson(const CVector& v) {
  ojson a = ojson::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(cjson(v(k)));
  return a;
}

ojson mjson(const CMatrix& m) {
  ojson a = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(cjson(m(r, k)));
    a.push_back(row);
  }
  return a;
}

void emit(const ojson& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) fail(ErrorKind::InvalidInput, "cannot write " + out);
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::InvalidInput, "cannot write " + path);
  f << text;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta functions, the Gauss map and Arakelov invariants of genus-2 curves"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string tau_s = "i", z_s = "0", r_s, s_s;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.eps, "theta truncation tolerance, in [1e-13, 1e-6]");
    sub->add_option("--seed", cfg.seed, "seed for sampled averages and random points");
    sub->add_option("--samples", cfg.samples, "sample points per identity");
    sub->add_option("--nodes", cfg.nodes, "quadrature nodes per unit mass");
    sub->add_option("--refine", cfg.refine, "extra quadrature refinement levels");
    sub->add_option("--out", cfg.output, "output file (stdout when omitted)");
  };

  auto* theta_cmd = app.add_subcommand("theta", "theta value, gradient and Hessian");
  theta_cmd->add_option("--tau", tau_s, "period matrix: 'i', 'diag(i,2i)' or 'a,b;c,d'");
  theta_cmd->add_option("--z", z_s, "point: comma-separated complex entries");
  add_common(theta_cmd);

  auto* eta_cmd = app.add_subcommand("eta", "bordered determinant and Gauss map at a divisor point");
  eta_cmd->add_option("--tau", tau_s, "period matrix");
  eta_cmd->add_option("--z", z_s, "point on the theta divisor");
  add_common(eta_cmd);

  auto* curve_cmd = app.add_subcommand("curve", "periods, Riemann constant and diagnostics of a curve");
  curve_cmd->add_option("file", cfg.curve_file, "curve JSON")->required();
  add_common(curve_cmd);

  auto* green_cmd = app.add_subcommand("green", "Arakelov Green's function G(R, S)");
  green_cmd->add_option("file", cfg.curve_file, "curve JSON")->required();
  green_cmd->add_option("--r", r_s, "point 'x:sheet' or 'inf'")->required();
  green_cmd->add_option("--s", s_s, "point 'x:sheet' or 'inf'")->required();
  add_common(green_cmd);

  auto* inv_cmd = app.add_subcommand("invariants", "delta, Bost's constant and the eta integral");
  inv_cmd->add_option("file", cfg.curve_file, "curve JSON")->required();
  add_common(inv_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "full verification report");
  verify_cmd->add_option("file", cfg.curve_file, "curve JSON")->required();
  add_common(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!(cfg.eps >= 1e-13 && cfg.eps <= 1e-6)) fail(ErrorKind::InvalidInput, "eps must lie in [1e-13, 1e-6]");

    if (*theta_cmd) {
      const PeriodMatrix tau = parse_tau(tau_s);
      const CVector z = parse_vector(z_s, tau.genus());
      const ThetaJet j = ThetaFunction(tau).jet(z, cfg.eps);
      ojson out;
      out["value"] = cjson(j.value);
      out["abs"] = std::abs(j.value);
      out["grad"] = vjson(j.grad);
      out["hess"] = mjson(j.hess);
      out["err_bound"] = j.err_bound;
      out["norm"] = ThetaFunction(tau).norm(z, cfg.eps);
      emit(out, cfg.output);
      return 0;
    }

    if (*eta_cmd) {
      const PeriodMatrix tau = parse_tau(tau_s);
      const AbelianPoint p{tau, parse_vector(z_s, tau.genus())};
      const EtaValue e = eta(p, cfg.eps);
      ojson out;
      out["eta"] = cjson(e.eta);
      out["eta_norm"] = e.eta_norm;
      out["log_eta_norm"] = e.log_eta_norm;
      out["theta_residual"] = e.theta_residual;
      try {
        out["gauss_map"] = vjson(gauss_map(p, cfg.eps).coords);
      } catch (const Error& err) {
        out["gauss_map"] = nullptr;
        out["gauss_map_error"] = err.what();
      }
      emit(out, cfg.output);
      return 0;
    }

    cfg.validate();
    const CurveModel c = build_curve(load_curve_file(cfg.curve_file));
    const QuadratureConfig q = cfg.quadrature();

    if (*curve_cmd) {
      ojson out;
      out["branch_points"] = ojson::array();
      for (cd e : c.branch_points()) out["branch_points"].push_back(cjson(e));
      out["tau"] = mjson(c.tau().tau());
      out["kappa"] = vjson(c.riemann_constant());
      out["gram"] = mjson(c.gram());
      const NuIntegral mass = integrate_nu(
          c, [](const CurveSample&) { return 1.0; }, q);
      out["diagnostics"] = {{"period_nodes", c.period_nodes()},
                            {"period_path_delta", c.period_path_delta()},
                            {"refinement_levels", q.refinement_levels},
                            {"nu_mass", mass.value},
                            {"nu_mass_error", mass.error}};
      emit(out, cfg.output);
      return 0;
    }

    if (*green_cmd) {
      const GreenEvaluator ge(c, q);
      const CurvePoint r = parse_point(r_s), s = parse_point(s_s);
      if (!r.at_infinity) (void)c.point_with_y(r.x, c.y(r));
      const Estimate lg = ge.log_green_estimate(r, s);
      ojson out;
      out["log_green"] = lg.value;
      out["log_green_error"] = lg.error;
      out["green"] = std::exp(lg.value);
      out["bost_A"] = ge.bost_A();
      out["bost_A_error"] = ge.bost_A_error();
      emit(out, cfg.output);
      return 0;
    }

    if (*inv_cmd) {
      const GreenEvaluator ge(c, q);
      const CurveInvariants inv = compute_invariants(c, ge, 5);
      ojson out;
      out["delta"] = inv.delta;
      out["delta_spread"] = inv.delta_spread;
      out["bost_A"] = inv.bost_A;
      out["bost_A_error"] = inv.bost_A_error;
      out["bost_A_crosscheck"] = inv.bost_A_crosscheck;
      out["bost_A_crosscheck_error"] = inv.bost_A_crosscheck_error;
      out["eta_integral"] = inv.eta_integral;
      out["eta_integral_error"] = inv.eta_integral_error;
      emit(out, cfg.output);
      return 0;
    }

    if (*verify_cmd) {
      const VerificationReport rep = run_verification(cfg);
      const std::string json = report_json(rep);
      if (cfg.output.empty()) {
        std::cout << json;
      } else {
        write_file(cfg.output, json);
        write_file(sibling(cfg.output, ".csv"), report_csv(rep));
        write_file(sibling(cfg.output, ".timings.json"), timings_json(rep));
      }
      for (const SuiteResult& s : rep.suites)
        std::cerr << (s.pass ? "PASS " : "FAIL ") << s.name << ": " << s.statistic << " = " << s.value
                  << " (tol " << s.tolerance << ")\n";
      if (!rep.error.empty()) std::cerr << "stopped at " << rep.stage << ": " << rep.error << "\n";
      return rep.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
