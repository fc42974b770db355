#include "plap/halflinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plap/error.hpp"
#include "plap/roots.hpp"

namespace plap {

Rhs::Rhs(Fn fn, double x_lo, double x_hi) : fn_(std::move(fn)), x_lo_(x_lo), x_hi_(x_hi) {}

double Rhs::eval(std::size_t node, double t, double x, double y) const {
  if (!admissible(x))
    throw DomainError("state " + std::to_string(x) + " outside admissible range", node);
  double v = 0.0;
  try {
    v = fn_(t, x, y);
  } catch (const EvalError& e) {
    throw DomainError(std::string("right-hand side: ") + e.what(), node);
  }
  if (!std::isfinite(v)) throw DomainError("right-hand side is not finite", node);
  return v;
}

Rhs Rhs::scaled(double lambda) const {
  return Rhs([fn = fn_, lambda](double t, double x, double y) { return lambda * fn(t, x, y); },
             x_lo_, x_hi_);
}

NodalFunction::NodalFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("nodal function size mismatch");
}

NodalFunction::NodalFunction(const PeriodicSample& s)
    : NodalFunction(s.grid(), std::vector<double>(s.values().begin(), s.values().end())) {}

double NodalFunction::operator()(double t) const {
  const double T = grid_.period();
  const auto n = static_cast<double>(grid_.intervals());
  double s = t / T;
  s -= std::floor(s);
  s *= n;
  double k = std::round(s);
  if (std::abs(s - k) <= 1e-9) {
    auto i = static_cast<std::size_t>(k);
    if (i >= grid_.intervals()) i = 0;
    return values_[i];
  }
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= grid_.intervals()) i = grid_.intervals() - 1;
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Rhs forcing_rhs(const PeriodicSample& w) {
  return Rhs([f = NodalFunction(w)](double t, double, double) { return f(t); });
}

PeriodicSample nemytskii(const Rhs& l, const PeriodicSample& v) {
  const Grid& g = v.grid();
  const auto u = v.values();
  const auto d = v.derivative();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.intervals(); ++i) out[i] = l.eval(i, g.node(i), u[i], d[i]);
  // t_N is t_0 on the circle.
  out[g.intervals()] = out[0];
  return PeriodicSample(g, std::move(out));
}

PeriodicSample proj_P(const PeriodicSample& v) {
  return PeriodicSample::constant(v.grid(), v.value(0));
}

PeriodicSample proj_Q(const PeriodicSample& w) {
  return PeriodicSample::constant(w.grid(), mean(w.grid(), w.values()));
}

double flux_balance(const ExponentField& pf, std::span<const double> wtilde, double a) {
  const Grid& g = pf.grid();
  std::vector<double> d(wtilde.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = phi_inv(pf[i], a + wtilde[i]);
  return integrate(g, d);
}

double solve_flux_constant(const ExponentField& pf, std::span<const double> wtilde) {
  if (wtilde.size() != pf.grid().size()) throw std::invalid_argument("flux sample size mismatch");
  auto A = [&](double a) { return flux_balance(pf, wtilde, a); };

  double lo = -1.0, hi = 1.0;
  double f_lo = A(lo), f_hi = A(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi))
    throw BracketFailure("flux balance is not finite");
  while (!(f_lo <= 0.0 && f_hi >= 0.0)) {
    if (f_lo > 0.0) {
      hi = lo;
      f_hi = f_lo;
      lo *= 2.0;
      f_lo = A(lo);
    } else {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      f_hi = A(hi);
    }
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || std::max(-lo, hi) > 1e12)
      throw BracketFailure("no sign change of the flux balance for |a| <= 1e12");
  }
  // A is monotone but only piecewise smooth (cusps where a + W vanishes at a node),
  // so bisect all the way down instead of trusting a width criterion.
  return bisect(A, lo, hi, f_lo, f_hi);
}

OperatorResult K_op(const ExponentField& pf, const PeriodicSample& w) {
  const Grid& g = w.grid();
  if (!(pf.grid() == g)) throw std::invalid_argument("exponent field and forcing grids differ");
  const double wbar = mean(g, w.values());
  std::vector<double> wt(w.values().begin(), w.values().end());
  for (double& x : wt) x -= wbar;
  auto W = cumint(g, wt);
  // w - mean(w) integrates to zero over a period; drop the rounding so that
  // phi_inv does not amplify it into a derivative closure gap.
  W.back() = 0.0;
  const double a = solve_flux_constant(pf, W);

  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = phi_inv(pf[i], a + W[i]);
  std::vector<double> u = cumint(g, d);
  PeriodicSample sol(g, std::move(u), std::move(d));

  PeriodicSample wts(g, std::move(wt));
  const double res = bvp_residual(pf, forcing_rhs(wts), sol);
  return {std::move(sol), a, res};
}

PeriodicSample G_map(const ExponentField& pf, const Rhs& l, const PeriodicSample& v) {
  const PeriodicSample n = nemytskii(l, v);
  const double q = mean(n.grid(), n.values());
  const OperatorResult k = K_op(pf, n);
  std::vector<double> u(k.u.values().begin(), k.u.values().end());
  const double shift = v.value(0) + q;
  for (double& x : u) x += shift;
  return PeriodicSample(v.grid(), std::move(u),
                        std::vector<double>(k.u.derivative().begin(), k.u.derivative().end()));
}

std::vector<double> node_residuals(const ExponentField& pf, const Rhs& l,
                                   const PeriodicSample& u) {
  const Grid& g = u.grid();
  const std::size_t n = g.intervals();
  const auto x = u.values();
  const auto d = u.derivative();
  const double h2 = 2.0 * g.step();
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = i == 0 ? n - 1 : i - 1;
    const double flux = (phi(pf[i + 1], d[i + 1]) - phi(pf[prev], d[prev])) / h2;
    r[i] = flux - l.eval(i, g.node(i), x[i], d[i]);
  }
  r[n] = r[0];
  return r;
}

double bvp_residual(const ExponentField& pf, const Rhs& l, const PeriodicSample& u) {
  const auto r = node_residuals(pf, l, u);
  return sup_norm(std::span<const double>(r).first(r.size() - 1));
}

}  // namespace plap
