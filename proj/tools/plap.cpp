// Command-line front end: solve, bounds, sweep, verify, oracle-check.
//
// Exit codes: 0 certified result (exists or nonexistence), 2 not certified,
// 1 error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plap/error.hpp"
#include "plap/oracle.hpp"
#include "plap/pipeline.hpp"
#include "plap/report.hpp"

namespace {

using namespace plap;

struct Common {
  std::string config;
  std::string out;
  std::size_t nodes = 0;
  double tol = 0.0;
};

void add_common(CLI::App* sub, Common& c, const char* tol_help) {
  sub->add_option("--config", c.config, "problem file (key = value lines)")->required();
  sub->add_option("--out", c.out, "output directory for report and CSV files");
  sub->add_option("--nodes", c.nodes, "override the number of grid intervals N");
  sub->add_option("--tol", c.tol, tol_help);
}

ProblemConfig load(const Common& c, bool tol_is_cert) {
  ProblemConfig cfg = load_config(c.config);
  if (c.nodes) cfg.N = c.nodes;
  if (c.tol > 0.0) (tol_is_cert ? cfg.cert_tol : cfg.solve_tol) = c.tol;
  validate_config(cfg);
  for (const auto& line : cfg.echo()) std::cerr << "config: " << line << "\n";
  return cfg;
}

int exit_code(Status s) { return s == Status::not_certified ? 2 : 0; }

int finish(const Certificate& cert, const Common& c) {
  std::cout << render_report(cert);
  if (!c.out.empty()) export_certificate(cert, c.out);
  return exit_code(cert.status);
}

int cmd_solve(const Common& c) { return finish(run_solve(load(c, false)), c); }

int cmd_bounds(const Common& c) {
  ProblemConfig cfg = load(c, false);
  const Certificate cert = run_bounds(cfg);
  std::cout << render_report(cert);
  if (!c.out.empty()) export_certificate(cert, c.out);
  const bool complete = std::any_of(cert.ledger.begin(), cert.ledger.end(),
                                    [](const auto& kv) { return kv.first == "M2"; });
  return complete ? 0 : 2;
}

int cmd_sweep(const Common& c) {
  const ProblemConfig cfg = load(c, false);
  const auto rows = corollary_sweep(cfg, cfg.sweep_hbar);
  const std::string table = sweep_csv(rows);
  std::cout << table;
  if (!c.out.empty()) {
    const std::filesystem::path dir(c.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "sweep.csv", table);
    for (std::size_t i = 0; i < rows.size(); ++i)
      export_certificate(rows[i].cert, dir / ("row" + std::to_string(i)));
  }
  for (const auto& r : rows)
    if (r.cert.status == Status::not_certified) return 2;
  return 0;
}

int cmd_verify(const Common& c, const std::string& csv_path) {
  const ProblemConfig cfg = load(c, true);
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + csv_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const VerifyResult r = verify_csv(cfg, ss.str());
  std::cout << "verify: " << (r.passed ? "PASS " : "FAIL ") << r.detail << "\n";
  std::cout << "residual = " << format_number(r.residual) << "\n";
  std::cout << "min u = " << format_number(r.min_u) << "\n";
  if (r.alpha) std::cout << "alpha = " << format_number(*r.alpha) << "\n";
  return r.passed ? 0 : 2;
}

int cmd_oracle(const Common& c, double max_diff) {
  const ProblemConfig cfg = load(c, false);
  const Certificate cert = run_solve(cfg);
  std::cout << render_report(cert);
  if (!c.out.empty()) export_certificate(cert, c.out);
  if (cert.status != Status::exists) {
    std::cout << "oracle-check: SKIP no solution to compare\n";
    return exit_code(cert.status);
  }
  const Problem prob = make_problem(cfg);
  const FdSystem sys(prob.pf);
  const NewtonResult orc = newton_solve(sys, original_rhs(prob), *cert.solution, {1e-9, 60});
  double diff = 0.0;
  for (std::size_t i = 0; i < orc.u.size(); ++i)
    diff = std::max(diff, std::abs(orc.u.value(i) - cert.solution->value(i)));
  std::printf("oracle-check: %s sup|u - u_oracle| = %.3e (limit %.1e), oracle residual %.3e after %d iterations\n",
              diff <= max_diff ? "PASS" : "FAIL", diff, max_diff, orc.residual, orc.iterations);
  return diff <= max_diff ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic solutions of p(t)-Laplacian Lienard equations with a singular restoring force"};
  app.require_subcommand(1);

  Common solve_opts, bounds_opts, sweep_opts, verify_opts, oracle_opts;
  std::string csv_path;
  double max_diff = 1e-5;

  auto* solve = app.add_subcommand("solve", "existence or nonexistence certificate");
  add_common(solve, solve_opts, "solver tolerance (solve_tol)");
  auto* bounds = app.add_subcommand("bounds", "hypotheses and bound constants only");
  add_common(bounds, bounds_opts, "solver tolerance (solve_tol)");
  auto* sweep = app.add_subcommand("sweep", "certificates for h = hbar + profile over sweep.hbar");
  add_common(sweep, sweep_opts, "solver tolerance (solve_tol)");
  auto* verify = app.add_subcommand("verify", "recompute the residual of a solution CSV");
  add_common(verify, verify_opts, "certification tolerance (cert_tol)");
  verify->add_option("--csv", csv_path, "solution CSV (t,u,du,residual)")->required();
  auto* oracle = app.add_subcommand("oracle-check", "solve, then compare with the finite-difference oracle");
  add_common(oracle, oracle_opts, "solver tolerance (solve_tol)");
  oracle->add_option("--max-diff", max_diff, "largest accepted sup-norm difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(solve_opts);
    if (*bounds) return cmd_bounds(bounds_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*verify) return cmd_verify(verify_opts, csv_path);
    if (*oracle) return cmd_oracle(oracle_opts, max_diff);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
