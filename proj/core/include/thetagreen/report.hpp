#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thetagreen/arakelov.hpp"
#include "thetagreen/errors.hpp"

namespace thetagreen {

/// Tolerances every suite is judged against.
namespace tolerance {
inline constexpr double kSingleIntegral = 2e-2;  // one quadrature downstream
inline constexpr double kNested = 5e-2;          // nested integrals
inline constexpr double kExtrapolated = 1e-1;    // limit-based Arakelov norms
inline constexpr double kDeltaSpread = 1e-3;     // times (1 + |delta|)
inline constexpr double kLambdaRelStd = 1e-2;
}  // namespace tolerance

struct RunConfig {
  std::string curve_file;
  double eps = 1e-12;  // theta truncation tolerance
  std::uint64_t seed = 0;
  int samples = 20;
  int nodes = 4000;
  int refine = 0;  // extra quadrature refinement levels
  std::string output;

  void validate() const;
  QuadratureConfig quadrature() const;
};

/// Reads {"f_coeffs": [[re, im], ...]} with c0..c5 (c5 = 1) or c0..c4.
std::array<cd, 6> load_curve_file(const std::string& path);

struct ResidualRow {
  std::string label;
  double parameter = 0.0;  // row index or path parameter
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

struct SuiteResult {
  std::string name;
  std::string statistic;  // what is compared against the tolerance
  double value = 0.0;     // the statistic
  double tolerance = 0.0;
  bool pass = false;
  std::vector<ResidualRow> rows;
  double seconds = 0.0;
};

struct VerificationReport {
  std::array<cd, 6> f_coeffs{};
  std::vector<cd> branch_points;
  CMatrix tau;
  CVector kappa;
  CurveInvariants invariants;
  std::vector<SuiteResult> suites;
  std::string stage = "start";  // last stage reached; "complete" on success
  std::string error;            // message of the failing stage, if any
  int exit_code = 0;
  std::vector<std::pair<std::string, double>> timings;  // wall clock per stage

  bool all_pass() const;
};

/// build -> periods -> A -> delta -> suites. Stage failures are caught and
/// recorded; exit_code follows the CLI contract (0 pass, 1 identity failure,
/// 2 input error, 3 numerical non-convergence).
VerificationReport run_verification(const RunConfig& config);

/// Deterministic JSON (fixed field order, no timings).
std::string report_json(const VerificationReport& r);
/// Timings only, kept apart so the main report is reproducible byte for byte.
std::string timings_json(const VerificationReport& r);
/// Rows of the main-theorem suite: index, x, sheet, log eta, log rhs, residual.
std::string report_csv(const VerificationReport& r);

/// Exit code for an error kind under the CLI contract.
int exit_code_for(ErrorKind kind);

}  // namespace thetagreen
