#include "plap/lower_upper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "plap/error.hpp"

namespace plap {

Rhs original_rhs(const Problem& prob) {
  return Rhs([h = NodalFunction(prob.h), f = prob.f, g = prob.g](double t, double x, double y) {
    return h(t) - g(x) - f(x) * y;
  }, 0.0);
}

BracketPair::BracketPair(PeriodicSample alpha, PeriodicSample beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), alpha_fn_(alpha_), beta_fn_(beta_) {
  if (!(alpha_.grid() == beta_.grid())) throw std::invalid_argument("bracket grids differ");
  if (!alpha_.has_derivative() || !beta_.has_derivative())
    throw std::invalid_argument("bracket samples need derivative channels");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_.value(i) > 0.0)) throw DomainError("lower solution is not positive", i);
    if (!(alpha_.value(i) <= beta_.value(i)))
      throw std::invalid_argument("bracket needs alpha <= beta at node " + std::to_string(i));
  }
}

double BracketPair::gamma(std::size_t node, double x) const {
  return std::clamp(x, alpha_.value(node), beta_.value(node));
}

double BracketPair::gamma_at(double t, double x) const {
  return std::clamp(x, alpha_fn_(t), beta_fn_(t));
}

Rhs modified_rhs(const Problem& prob, const BracketPair& pair) {
  return Rhs([h = NodalFunction(prob.h), f = prob.f, g = prob.g, pair](double t, double x, double y) {
    const double c = pair.gamma_at(t, x);
    return h(t) - g(c) - f(c) * y + x - c;
  });
}

namespace {

MarginReport margins(const Problem& prob, const PeriodicSample& w) {
  const Grid& grid = w.grid();
  if (!(grid == prob.pf.grid()) || !(grid == prob.h.grid()))
    throw std::invalid_argument("candidate grid differs from problem grid");
  if (!w.has_derivative()) throw std::invalid_argument("candidate needs a derivative channel");
  const auto u = w.values();
  const auto d = w.derivative();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0)) throw DomainError("candidate leaves (0, inf)", i);

  const std::size_t n = grid.intervals();
  const double h2 = 2.0 * grid.step();
  MarginReport rep{false, {}, 0.0, 0.0, d[0] - d[n], false};
  rep.residuals.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double flux = (phi(prob.pf[i + 1], d[i + 1]) - phi(prob.pf[i - 1], d[i - 1])) / h2;
    const double r = flux + prob.f(u[i]) * d[i] + prob.g(u[i]) - prob.h.value(i);
    if (!std::isfinite(r)) throw DomainError("non-finite residual", i);
    rep.residuals.push_back(r);
  }
  const auto [lo, hi] = std::minmax_element(rep.residuals.begin(), rep.residuals.end());
  rep.min_residual = *lo;
  rep.max_residual = *hi;
  return rep;
}

}  // namespace

MarginReport verify_lower(const Problem& prob, const PeriodicSample& alpha, double tol) {
  MarginReport rep = margins(prob, alpha);
  rep.endpoint_ok = rep.endpoint_gap >= -tol;
  rep.passed = rep.endpoint_ok && rep.min_residual >= -tol;
  return rep;
}

MarginReport verify_upper(const Problem& prob, const PeriodicSample& beta, double tol) {
  MarginReport rep = margins(prob, beta);
  rep.endpoint_ok = rep.endpoint_gap <= tol;
  rep.passed = rep.endpoint_ok && rep.max_residual <= tol;
  return rep;
}

BracketedSolution solve_bracketed(const Problem& prob, const BracketPair& pair,
                                  const HomotopyOptions& opts) {
  if (!verify_lower(prob, pair.alpha()).passed)
    throw PreconditionFailed("alpha does not verify as a lower solution");
  if (!verify_upper(prob, pair.beta()).passed)
    throw PreconditionFailed("beta does not verify as an upper solution");

  const auto a = pair.alpha().values();
  const auto b = pair.beta().values();
  const auto h = prob.h.values();
  const double M1 = compute_M1(a, b, h, prob.g);
  const BracketBounds bb =
      compute_c3_M2(M1, prob.f, prob.g, a, b, h, prob.pf.grid().period(), prob.pf.p_minus(),
                    prob.pf.p_plus());

  const Rhs lstar = modified_rhs(prob, pair);
  HomotopyOptions o = opts;
  o.gauge = Gauge::none;
  if (!o.scan) o.scan = ScanRange{-M1, M1, 512};
  HomotopyResult run = homotopy_solve(prob.pf, lstar, bb.M1 + bb.M2, o);

  const double tol = 1e-8 * (1.0 + sup_norm(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ui = run.u.value(i);
    if (ui < a[i] - tol || ui > b[i] + tol) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "solution leaves the bracket at node %zu: %.17g not in [%.17g, %.17g]",
                    i, ui, a[i], b[i]);
      throw BracketViolation(buf);
    }
  }
  const double res = bvp_residual(prob.pf, original_rhs(prob), run.u);
  if (res > opts.tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "original residual %.3e exceeds %.3e inside the bracket", res, opts.tol);
    throw BracketViolation(buf);
  }
  return {run.u, res, run.residual, tol, bb, std::move(run)};
}

double find_constant_lower(const ScalarFn& g, double h_max, double x_min, double x_max, int n) {
  if (!(x_min > 0.0) || !(x_max > x_min) || n < 2)
    throw std::invalid_argument("lower search needs 0 < x_min < x_max and n >= 2");
  const double e0 = std::log10(x_min), e1 = std::log10(x_max);
  for (int k = n - 1; k >= 0; --k) {
    const double x = k == 0 ? x_min : k == n - 1 ? x_max : std::pow(10.0, e0 + (e1 - e0) * k / (n - 1));
    if (g(x) >= h_max) return x;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "no grid point in [%g, %g] has g(x) >= %g", x_min, x_max, h_max);
  throw NotFound(buf);
}

ScalarFn freeze_negative(const ScalarFn& f) {
  return [f, f0 = f(0.0)](double x) { return x >= 0.0 ? f(x) : f0; };
}

UpperConstruction build_upper(const Problem& prob, double delta, const HomotopyOptions& opts) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const Grid& grid = prob.pf.grid();
  const auto parts = decompose(prob.h);
  const double hbar = parts.mean;
  const PeriodicSample& htilde = parts.tilde;
  const double K = compute_K(grid.period(), prob.pf.p_minus(), l1_norm(grid, htilde.values())).K;

  constexpr int samples = 1000;
  for (int k = 0; k < samples; ++k) {
    const double x = delta + 10.0 * K * k / (samples - 1);
    const double gx = prob.g(x);
    if (!(gx < hbar)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "g(%.6g) = %.6g is not below mean(h) = %.6g", x, gx, hbar);
      throw TailCheckFailed(buf);
    }
  }

  const double c = delta + K;
  const ScalarFn f0 = freeze_negative(prob.f);
  const ScalarFn theta = [f0, c](double x) { return f0(c + x); };
  // The eps-family sampler needs an exactly zero-mean forcing.
  std::vector<double> e(htilde.values().begin(), htilde.values().end());
  const double drift = mean(grid, e);
  for (double& x : e) x -= drift;
  const EpsProblemResult aux = solve_eps_problem(prob.pf, theta, PeriodicSample(grid, std::move(e)), 0.0, opts);

  std::vector<double> beta(aux.u.values().begin(), aux.u.values().end());
  for (double& x : beta) x += c;
  PeriodicSample b(grid, std::move(beta),
                   std::vector<double>(aux.u.derivative().begin(), aux.u.derivative().end()));
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.value(i) < delta - 1e-10) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "beta = %.17g below delta = %.17g at node %zu", b.value(i), delta, i);
      throw BoundViolation(buf);
    }
  }
  MarginReport check = verify_upper(prob, b);
  if (!check.passed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "beta fails the upper check (max residual %.3e)", check.max_residual);
    throw PreconditionFailed(buf);
  }
  return {std::move(b), aux.u, c, K, hbar, aux.bounds, std::move(check)};
}

}  // namespace plap
