#include "plap/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "plap/error.hpp"
#include "plap/halflinear.hpp"

namespace plap {

namespace {

constexpr int kTailSamples = 1000;
constexpr int kPositivitySamples = 2000;

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Empty on success, otherwise the first failing sample.
std::string tail_failure(const ScalarFn& g, double hbar, double delta, double K) {
  for (int k = 0; k < kTailSamples; ++k) {
    const double x = delta + 10.0 * K * k / (kTailSamples - 1);
    const double gx = g(x);
    if (!(gx < hbar)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "g(%.6g) = %.6g is not below mean(h) = %.6g", x, gx, hbar);
      return buf;
    }
  }
  return {};
}

// First threshold 2^k max(alpha, 1), k < 40, that passes the tail sample.
std::optional<double> auto_delta(const ScalarFn& g, double hbar, double K, double start) {
  double d = std::max(start, 1.0);
  for (int k = 0; k < 40; ++k, d *= 2.0)
    if (tail_failure(g, hbar, d, K).empty()) return d;
  return std::nullopt;
}

HomotopyOptions solver_options(const ProblemConfig& cfg) {
  HomotopyOptions o;
  o.tol = cfg.solve_tol;
  return o;
}

bool mean_nonpositive(const PeriodicSample& h, double hbar) {
  return hbar <= 1e-12 * (1.0 + sup_norm(h.values()));
}

void add_chain(Certificate& c, const std::string& prefix, const AprioriConstants& a) {
  c.ledger.emplace_back(prefix + "R1", a.R1);
  c.ledger.emplace_back(prefix + "R2", a.R2);
  c.ledger.emplace_back(prefix + "R3", a.R3);
  c.ledger.emplace_back(prefix + "R4", a.R4);
  c.ledger.emplace_back(prefix + "R", a.R);
}

void add_bracket_bounds(Certificate& c, const BracketBounds& b) {
  c.ledger.emplace_back("M1", b.M1);
  c.ledger.emplace_back("c3", b.c3);
  c.ledger.emplace_back("M2", b.M2);
}

void add_hypotheses(Certificate& c, const HypothesisReport& h) {
  c.ledger.emplace_back("hbar", h.hbar);
  c.ledger.emplace_back("h_max", h.h_max);
  if (h.alpha) c.ledger.emplace_back("alpha", *h.alpha);
  c.ledger.emplace_back("K", h.K);
  if (h.delta) c.ledger.emplace_back("delta", *h.delta);
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::exists: return "exists";
    case Status::nonexistence: return "nonexistence";
    case Status::not_certified: return "not_certified";
  }
  return "?";
}

std::vector<std::string> HypothesisReport::lines() const {
  std::vector<std::string> out;
  out.push_back(std::string("lower constant: ") + (lower_ok() ? "PASS " : "FAIL ") + lower_detail);
  if (!tail_checked) {
    out.push_back("tail sample: SKIP " + tail_detail);
  } else {
    out.push_back(std::string("tail sample: ") + (tail_ok ? "PASS " : "FAIL ") + tail_detail);
  }
  out.push_back(std::string("tail asserted: ") + (tail_asserted ? "PASS" : "FAIL") +
                " limsup g < mean(h) beyond the sample");
  out.push_back(std::string("mean of h: ") + (hbar > 0.0 ? "PASS " : "FAIL ") +
                "hbar = " + format_number(hbar));
  return out;
}

Problem make_problem(const ProblemConfig& cfg) {
  const auto f = cfg.f;
  const auto g = cfg.g;
  return Problem{cfg.exponent_field(), [f](double x) { return f(x); }, [g](double x) { return g(x); },
                 cfg.h_sample()};
}

HypothesisReport check_hypotheses(const ProblemConfig& cfg) {
  HypothesisReport r;
  const Grid grid = cfg.grid();
  const PeriodicSample h = cfg.h_sample();
  const auto parts = decompose(h);
  r.hbar = parts.mean;
  r.h_max = *std::max_element(h.values().begin(), h.values().end());
  const ExponentField pf = cfg.exponent_field();
  r.K = compute_K(grid.period(), pf.p_minus(), l1_norm(grid, parts.tilde.values())).K;
  r.tail_asserted = cfg.tail_asserted;
  const ScalarFn g = [gg = cfg.g](double x) { return gg(x); };

  const auto& s = cfg.alpha_search;
  try {
    r.alpha = find_constant_lower(g, r.h_max, s.x_min, s.x_max, s.n);
    r.lower_detail = "alpha = " + format_number(*r.alpha) + ", g(alpha) = " + format_number(g(*r.alpha)) +
                     " >= max h = " + format_number(r.h_max);
  } catch (const Error& e) {
    r.lower_detail = e.what();
  }

  if (cfg.delta) {
    r.delta = cfg.delta;
  } else if (cfg.mode == Mode::bounds_only) {
    r.tail_detail = "no delta given";
    return r;
  } else {
    r.delta = auto_delta(g, r.hbar, r.K, r.alpha.value_or(1.0));
    r.delta_auto = true;
    if (!r.delta) {
      r.tail_checked = true;
      r.tail_detail = "no threshold up to 2^39 has g below mean(h) = " + format_number(r.hbar) +
                      " on its sample";
      return r;
    }
  }
  r.tail_checked = true;
  try {
    r.tail_detail = tail_failure(g, r.hbar, *r.delta, r.K);
  } catch (const Error& e) {
    r.tail_detail = e.what();
  }
  r.tail_ok = r.tail_detail.empty();
  if (r.tail_ok)
    r.tail_detail = "g < mean(h) on [" + format_number(*r.delta) + ", " +
                    format_number(*r.delta + 10.0 * r.K) + "]" + (r.delta_auto ? " (delta chosen)" : "");
  return r;
}

Certificate solve_main(const ProblemConfig& cfg) {
  const HypothesisReport hyp = check_hypotheses(cfg);
  if (!hyp.passed()) {
    std::string msg = "hypotheses not satisfied:";
    for (const auto& l : hyp.lines()) msg += "\n  " + l;
    throw HypothesisFailure(msg);
  }

  Certificate cert;
  cert.hypotheses = hyp;
  add_hypotheses(cert, hyp);
  const double alpha = *hyp.alpha;
  const double delta = *hyp.delta;
  try {
    const Problem prob = make_problem(cfg);
    const Grid& grid = prob.pf.grid();
    const HomotopyOptions opts = solver_options(cfg);
    const UpperConstruction up = build_upper(prob, delta, opts);
    cert.ledger.emplace_back("c_delta", up.c_delta);
    add_chain(cert, "aux.", up.chain);

    const BracketPair pair(PeriodicSample::constant(grid, alpha), up.beta);
    const BracketedSolution sol = solve_bracketed(prob, pair, opts);
    add_bracket_bounds(cert, sol.bounds);
    if (sol.run.degree) cert.ledger.emplace_back("degree", sol.run.degree->degree);
    cert.ledger.emplace_back("start", sol.run.start);
    cert.ledger.emplace_back("steps", static_cast<double>(sol.run.trace.size()));

    const auto u = sol.u.values();
    const auto b = up.beta.values();
    BracketSummary br{alpha, *std::min_element(b.begin(), b.end()), *std::max_element(b.begin(), b.end()),
                      delta, up.c_delta, INFINITY, INFINITY, up.check.max_residual};
    for (std::size_t i = 0; i < u.size(); ++i) {
      br.lower_margin = std::min(br.lower_margin, u[i] - alpha);
      br.upper_margin = std::min(br.upper_margin, b[i] - u[i]);
    }
    cert.bracket = br;
    cert.node_residuals = node_residuals(prob.pf, original_rhs(prob), sol.u);
    cert.residual = sol.residual;
    cert.solution = sol.u;

    const double min_u = *std::min_element(u.begin(), u.end());
    if (!(cert.residual <= cfg.cert_tol)) {
      cert.reason = "residual " + fmt("%.3e", cert.residual) + " above cert_tol";
    } else if (!(min_u > 0.0)) {
      cert.reason = "solution is not positive";
    } else if (br.lower_margin < -1e-10) {
      cert.reason = "solution dips below alpha by " + fmt("%.3e", -br.lower_margin);
    } else {
      cert.status = Status::exists;
      cert.reason = "u solves the equation to " + fmt("%.3e", cert.residual) + " with " +
                    format_number(alpha) + " <= u <= beta";
    }
  } catch (const std::exception& e) {
    cert.status = Status::not_certified;
    cert.reason = e.what();
    cert.diagnostics.push_back(std::string("solver: ") + e.what());
  }
  return cert;
}

Certificate nonexistence_check(const ProblemConfig& cfg) {
  Certificate cert;
  const PeriodicSample h = cfg.h_sample();
  const double hbar = mean(cfg.grid(), h.values());
  cert.ledger.emplace_back("hbar", hbar);

  const double x_max = cfg.positivity_x_max;
  const double e0 = std::log10(x_max) - 12.0, e1 = std::log10(x_max);
  std::string gate;
  for (int k = 0; k < kPositivitySamples && gate.empty(); ++k) {
    const double x = k == kPositivitySamples - 1 ? x_max
                                                 : std::pow(10.0, e0 + (e1 - e0) * k / (kPositivitySamples - 1));
    double gx;
    try {
      gx = cfg.g(x);
    } catch (const Error& e) {
      gate = e.what();
      break;
    }
    if (!(gx > 0.0)) gate = "g(" + format_number(x) + ") = " + format_number(gx) + " is not positive";
  }
  if (gate.empty() && !cfg.positivity_asserted) gate = "positivity of g beyond the sample is not asserted";
  if (!gate.empty()) {
    cert.reason = "not applicable: " + gate;
    return cert;
  }
  cert.ledger.emplace_back("positivity_x_max", x_max);
  if (mean_nonpositive(h, hbar)) {
    cert.status = Status::nonexistence;
    cert.reason = "mean of g(u) over a period equals hbar = " + format_number(hbar) +
                  " <= 0, impossible for g > 0";
  } else {
    cert.reason = "not applicable: hbar = " + format_number(hbar) + " > 0";
  }
  return cert;
}

Certificate run_solve(const ProblemConfig& cfg) {
  Certificate none = nonexistence_check(cfg);
  if (none.status == Status::nonexistence) return none;
  try {
    return solve_main(cfg);
  } catch (const HypothesisFailure& e) {
    Certificate cert;
    cert.hypotheses = check_hypotheses(cfg);
    add_hypotheses(cert, *cert.hypotheses);
    cert.reason = "hypotheses not satisfied";
    cert.diagnostics.push_back(e.what());
    cert.diagnostics.push_back("obstruction: " + none.reason);
    return cert;
  }
}

Certificate run_bounds(const ProblemConfig& cfg) {
  Certificate cert;
  const HypothesisReport hyp = check_hypotheses(cfg);
  cert.hypotheses = hyp;
  add_hypotheses(cert, hyp);
  if (!hyp.lower_ok() || !hyp.delta || !hyp.tail_ok) {
    cert.reason = "bracket constants need a lower constant and a passing tail sample";
    return cert;
  }
  try {
    const Problem prob = make_problem(cfg);
    const UpperConstruction up = build_upper(prob, *hyp.delta, solver_options(cfg));
    cert.ledger.emplace_back("c_delta", up.c_delta);
    add_chain(cert, "aux.", up.chain);
    const auto b = up.beta.values();
    const std::vector<double> a(b.size(), *hyp.alpha);
    const double M1 = compute_M1(a, b, prob.h.values(), prob.g);
    add_bracket_bounds(cert, compute_c3_M2(M1, prob.f, prob.g, a, b, prob.h.values(),
                                           prob.pf.grid().period(), prob.pf.p_minus(),
                                           prob.pf.p_plus()));
    cert.reason = "bounds computed";
  } catch (const std::exception& e) {
    cert.reason = e.what();
    cert.diagnostics.push_back(std::string("bounds: ") + e.what());
  }
  return cert;
}

std::vector<SweepRow> corollary_sweep(const ProblemConfig& cfg, std::span<const double> hbar_values) {
  std::vector<std::future<Certificate>> jobs;
  jobs.reserve(hbar_values.size());
  for (double v : hbar_values) {
    ProblemConfig row = with_mean_forcing(cfg, v);
    row.mode = Mode::solve;
    jobs.push_back(std::async(std::launch::async, [row = std::move(row)] { return run_solve(row); }));
  }
  std::vector<SweepRow> out;
  out.reserve(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out.push_back({hbar_values[i], jobs[i].get()});
  return out;
}

VerifyResult verify_csv(const ProblemConfig& cfg, std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != "t,u,du,residual")
    throw ConfigError("csv", 1, "expected header t,u,du,residual");
  std::vector<double> t, u, du;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double cols[4];
    const char* p = line.data();
    const char* end = p + line.size();
    for (int c = 0; c < 4; ++c) {
      auto [q, ec] = std::from_chars(p, end, cols[c]);
      if (ec != std::errc{}) throw ConfigError("csv", lineno, "malformed number");
      p = q;
      if (c < 3) {
        if (p == end || *p != ',') throw ConfigError("csv", lineno, "expected 4 columns");
        ++p;
      }
    }
    if (p != end) throw ConfigError("csv", lineno, "trailing characters");
    t.push_back(cols[0]);
    u.push_back(cols[1]);
    du.push_back(cols[2]);
  }
  if (t.size() < Grid::min_intervals + 1) throw ConfigError("csv", lineno, "too few rows");

  ProblemConfig c = cfg;
  c.N = t.size() - 1;
  c.T = t.back();
  const Grid grid = c.grid();
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - grid.node(i)) > 1e-12 * (1.0 + c.T))
      throw ConfigError("csv", i + 2, "t column is not a uniform grid");

  VerifyResult r;
  const Problem prob = make_problem(c);
  const PeriodicSample sol(grid, u, du);
  r.node_residuals = node_residuals(prob.pf, original_rhs(prob), sol);
  r.residual = bvp_residual(prob.pf, original_rhs(prob), sol);
  r.min_u = *std::min_element(u.begin(), u.end());
  const auto& s = c.alpha_search;
  const PeriodicSample h = c.h_sample();
  try {
    r.alpha = find_constant_lower(prob.g, *std::max_element(h.values().begin(), h.values().end()),
                                  s.x_min, s.x_max, s.n);
  } catch (const NotFound&) {
  }
  if (!(r.residual <= c.cert_tol)) {
    r.detail = "residual " + fmt("%.3e", r.residual) + " above cert_tol " + fmt("%.3e", c.cert_tol);
  } else if (!(r.min_u > 0.0)) {
    r.detail = "solution is not positive";
  } else if (r.alpha && r.min_u < *r.alpha - 1e-10) {
    r.detail = "min u = " + format_number(r.min_u) + " below alpha = " + format_number(*r.alpha);
  } else {
    r.passed = true;
    r.detail = "residual " + fmt("%.3e", r.residual) + ", min u = " + format_number(r.min_u);
  }
  return r;
}

}  // namespace plap
