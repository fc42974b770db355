#pragma once

// Existence and nonexistence certificates for
//   (phi_{p(t)}(u'))' + f(u) u' + g(u) = h(t)
// with an attractive singular g, driven by a ProblemConfig.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "plap/config.hpp"
#include "plap/lower_upper.hpp"

namespace plap {

struct HypothesisReport {
  double h_max = 0.0;
  double hbar = 0.0;
  std::optional<double> alpha;  // constant lower solution, g(alpha) >= max h
  std::string lower_detail;
  double K = 0.0;               // uniform bound for |h~|_{L1}
  std::optional<double> delta;
  bool delta_auto = false;
  bool tail_checked = false;
  bool tail_ok = false;
  std::string tail_detail;
  bool tail_asserted = false;

  bool lower_ok() const { return alpha.has_value(); }
  bool passed() const { return lower_ok() && tail_checked && tail_ok && tail_asserted; }
  /// One `name: PASS|FAIL|SKIP detail` line per hypothesis.
  std::vector<std::string> lines() const;
};

enum class Status { exists, nonexistence, not_certified };

std::string_view to_string(Status s);

struct BracketSummary {
  double alpha;
  double beta_min, beta_max;
  double delta, c_delta;
  double lower_margin;  // min (u - alpha)
  double upper_margin;  // min (beta - u)
  double upper_check;   // max residual of beta as an upper solution
};

struct Certificate {
  Status status = Status::not_certified;
  std::optional<PeriodicSample> solution;
  std::vector<double> node_residuals;  // original equation, N + 1 entries
  double residual = 0.0;
  std::optional<BracketSummary> bracket;
  /// Bound constants and run figures in a fixed order.
  std::vector<std::pair<std::string, double>> ledger;
  std::optional<HypothesisReport> hypotheses;
  std::string reason;
  std::vector<std::string> diagnostics;
};

Problem make_problem(const ProblemConfig& cfg);

HypothesisReport check_hypotheses(const ProblemConfig& cfg);

/// Lower constant, upper solution from the tail threshold, bracketed solve.
/// Throws HypothesisFailure when check_hypotheses does not pass; every solver
/// error yields status not_certified with the message as the reason.
Certificate solve_main(const ProblemConfig& cfg);

/// Integral obstruction: with g > 0 on a log grid over (0, positivity_x_max]
/// and positivity asserted, mean(h) <= 0 rules out a solution. Status is
/// nonexistence when it applies and not_certified otherwise.
Certificate nonexistence_check(const ProblemConfig& cfg);

/// nonexistence_check first, then solve_main; hypothesis failures become
/// not_certified.
Certificate run_solve(const ProblemConfig& cfg);

/// Hypotheses and bound constants without the final solve.
Certificate run_bounds(const ProblemConfig& cfg);

struct SweepRow {
  double hbar;
  Certificate cert;
};

/// One run_solve per value with h = value + sweep profile. Rows run
/// concurrently and come back in input order.
std::vector<SweepRow> corollary_sweep(const ProblemConfig& cfg, std::span<const double> hbar_values);

struct VerifyResult {
  bool passed = false;
  double residual = 0.0;
  double min_u = 0.0;
  std::optional<double> alpha;
  std::vector<double> node_residuals;
  std::string detail;
};

/// Recomputes the residual of the original equation from the t, u, du columns
/// of a solution CSV. The grid comes from the CSV (N = rows - 1, T = last t).
/// Passes when residual <= cert_tol, min u > 0 and min u >= alpha - 1e-10 with
/// alpha re-derived from the hypotheses. Throws ConfigError on malformed CSV.
VerifyResult verify_csv(const ProblemConfig& cfg, std::string_view csv);

}  // namespace plap
