#include "plap/continuation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "plap/error.hpp"
#include "plap/roots.hpp"

namespace plap {

AveragedMap::AveragedMap(Rhs l, Grid grid) : l_(std::move(l)), grid_(grid) {}

double AveragedMap::operator()(double a) const {
  std::vector<double> v(grid_.size());
  for (std::size_t i = 0; i < grid_.intervals(); ++i) v[i] = l_.eval(i, grid_.node(i), a, 0.0);
  v[grid_.intervals()] = v[0];
  return mean(grid_, v);
}

double averaged_eval(const AveragedMap& L, double a) { return L(a); }

ScanRange scan_range(const Rhs& l, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("scan range needs R > 0");
  double lo = -R, hi = R;
  if (std::isfinite(l.x_lo()) && l.x_lo() >= lo)
    lo = l.x_lo() + 1e-12 * std::max({1.0, std::abs(l.x_lo()), R});
  if (std::isfinite(l.x_hi()) && l.x_hi() <= hi)
    hi = l.x_hi() - 1e-12 * std::max({1.0, std::abs(l.x_hi()), R});
  if (!(lo < hi)) throw std::invalid_argument("scan range is empty");
  return {lo, hi, 512};
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> scan_points(const ScanRange& r) {
  const int n = std::max(r.points, 2);
  std::vector<double> x(n);
  const bool log_spaced = r.lo > 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / (n - 1);
    x[k] = log_spaced ? r.lo * std::pow(r.hi / r.lo, s) : r.lo + (r.hi - r.lo) * s;
  }
  x.front() = r.lo;
  x.back() = r.hi;
  return x;
}

}  // namespace

std::vector<double> averaged_roots(const AveragedMap& L, const ScanRange& range) {
  const auto x = scan_points(range);
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = L(x[k]);
  std::vector<double> roots;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (y[k] == 0.0) {
      roots.push_back(x[k]);
      continue;
    }
    if (k + 1 < x.size() && y[k + 1] != 0.0 && sign_of(y[k]) != sign_of(y[k + 1]))
      roots.push_back(bisect(L, x[k], x[k + 1], y[k], y[k + 1]));
  }
  return roots;
}

double averaged_root(const AveragedMap& L, const ScanRange& range) {
  const auto roots = averaged_roots(L, range);
  if (roots.empty())
    throw NoBracket("averaged map has no sign change on [" + std::to_string(range.lo) + ", " +
                    std::to_string(range.hi) + "]");
  return roots.front();
}

DegreeResult brouwer_degree(const AveragedMap& L, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("degree interval is empty");
  DegreeResult d{lo, hi, sign_of(L(lo)), sign_of(L(hi)), 0};
  if (d.sign_left == 0 || d.sign_right == 0)
    throw BoundaryZero("averaged map vanishes on the boundary of the degree interval");
  d.degree = (d.sign_right - d.sign_left) / 2;
  return d;
}

DegreeResult brouwer_degree(const AveragedMap& L, double R) { return brouwer_degree(L, -R, R); }

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

int alt(std::size_t i) { return i % 2 ? -1 : 1; }

// (1/(p-1)) (y^2 + reg^2)^{(2-p)/(2(p-1))}: regularised slope of phi_inv.
double phi_inv_slope(double p, double y, double reg) {
  if (p == 2.0) return 1.0;
  return std::pow(y * y + reg * reg, 0.5 * (2.0 - p) / (p - 1.0)) / (p - 1.0);
}

// Mixed collocation with node values u_i = base + v_i and fluxes q_i:
//   E_i = (q_{i+1} - q_{i-1}) / (2 dt) - lambda l(t_i, u_i, d_i)
//   C_i = (phi_inv(q_i) - Dc u_i) / dt   if p_i < 2,   d_i = phi_inv(q_i)
//   C_i = (phi(Dc u_i) - q_i) / dt       otherwise,    d_i = Dc u_i
// Dc is the centered difference on the cyclic grid. Each node uses whichever of
// phi, phi_inv is Lipschitz at 0, so neither the p < 2 cusp nor the p > 2
// degeneracy enters the Jacobian. With C = 0, E is the node residual of
// (phi(u'))' = lambda l. In the zero-mean gauge, E_i - mu - nu (-1)^i is balanced
// against mean(v) = target and sum (-1)^i v_i = 0.
class Collocation {
 public:
  Collocation(const ExponentField& pf, const Rhs& l, double base, const HomotopyOptions& opts)
      : pf_(pf), l_(l), grid_(pf.grid()), n_(grid_.intervals()), dt_(grid_.step()), base_(base),
        reg_(opts.jacobian_reg), gauge_(opts.gauge == Gauge::zero_mean),
        alternate_(gauge_ && n_ % 2 == 0), target_(opts.mean_target - base) {}

  std::size_t unknowns() const { return 2 * n_ + (gauge_ ? (alternate_ ? 2 : 1) : 0); }
  std::size_t nodes() const { return n_; }
  bool gauged() const { return gauge_; }
  bool alternating() const { return alternate_; }

  std::size_t wrap(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    return static_cast<std::size_t>(((i % n) + n) % n);
  }
  std::size_t next(std::size_t i) const { return i + 1 == n_ ? 0 : i + 1; }
  std::size_t prev(std::size_t i) const { return i == 0 ? n_ - 1 : i - 1; }
  bool inverse_row(std::size_t i) const { return pf_[i] < 2.0; }

  double dc(const Vec& x, std::size_t i) const { return (x[next(i)] - x[prev(i)]) / (2.0 * dt_); }
  double flux(const Vec& x, std::size_t i) const { return x[n_ + i]; }

  std::vector<double> channel(const Vec& x) const {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i)
      d[i] = inverse_row(i) ? phi_inv(pf_[i], flux(x, i)) : dc(x, i);
    return d;
  }

  Vec residual(const Vec& x, double lambda) const {
    const auto d = channel(x);
    Vec F(unknowns());
    for (std::size_t i = 0; i < n_; ++i) {
      F[i] = (flux(x, next(i)) - flux(x, prev(i))) / (2.0 * dt_) -
             lambda * l_.eval(i, grid_.node(i), base_ + x[i], d[i]);
      F[n_ + i] = (inverse_row(i) ? d[i] - dc(x, i) : phi(pf_[i], d[i]) - flux(x, i)) / dt_;
    }
    if (gauge_) {
      const std::size_t m = 2 * n_;
      double s = 0.0, a = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        s += x[i];
        a += alt(i) * x[i];
        F[i] -= x[m] + (alternate_ ? alt(i) * x[m + 1] : 0.0);
      }
      F[m] = s / static_cast<double>(n_) - target_;
      if (alternate_) F[m + 1] = a / static_cast<double>(n_);
    }
    return F;
  }

  SpMat jacobian(const Vec& x, double lambda) const {
    const auto d = channel(x);
    const double c1 = 1.0 / (2.0 * dt_);
    const double s = 1.0 / dt_;
    const auto n = static_cast<int>(n_);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(10 * n_ + 4);
    for (std::size_t i = 0; i < n_; ++i) {
      const int r = static_cast<int>(i);
      const int up = static_cast<int>(next(i)), dn = static_cast<int>(prev(i));
      const double t = grid_.node(i), u = base_ + x[i];
      const double lx = d_dx(i, t, u, d[i]);
      const double ly = d_dy(i, t, u, d[i]);

      trip.emplace_back(r, n + up, c1);
      trip.emplace_back(r, n + dn, -c1);
      trip.emplace_back(r, r, -lambda * lx);
      if (inverse_row(i)) {
        const double dq = phi_inv_slope(pf_[i], flux(x, i), reg_);
        trip.emplace_back(r, n + r, -lambda * ly * dq);
        trip.emplace_back(n + r, n + r, s * dq);
        trip.emplace_back(n + r, up, -s * c1);
        trip.emplace_back(n + r, dn, s * c1);
      } else {
        trip.emplace_back(r, up, -lambda * ly * c1);
        trip.emplace_back(r, dn, lambda * ly * c1);
        const double dp = phi_slope(pf_[i], d[i], reg_);
        trip.emplace_back(n + r, up, s * dp * c1);
        trip.emplace_back(n + r, dn, -s * dp * c1);
        trip.emplace_back(n + r, n + r, -s);
      }
      if (gauge_) {
        const int m = 2 * n;
        trip.emplace_back(r, m, -1.0);
        trip.emplace_back(m, r, 1.0 / n_);
        if (alternate_) {
          trip.emplace_back(r, m + 1, -alt(i));
          trip.emplace_back(m + 1, r, alt(i) / static_cast<double>(n_));
        }
      }
    }
    const auto m = static_cast<int>(unknowns());
    SpMat J(m, m);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  PeriodicSample sample(const Vec& x) const {
    const auto d = channel(x);
    std::vector<double> u(n_ + 1), du(n_ + 1);
    for (std::size_t i = 0; i < n_; ++i) {
      u[i] = base_ + x[i];
      du[i] = d[i];
    }
    u[n_] = u[0];
    du[n_] = du[0];
    return PeriodicSample(grid_, std::move(u), std::move(du));
  }

  // Unknowns from node values and derivatives (fluxes from phi of the derivative).
  Vec unknowns_from(std::span<const double> u, std::span<const double> du, const Vec& previous) const {
    Vec x = previous;
    for (std::size_t i = 0; i < n_; ++i) {
      x[i] = u[i] - base_;
      x[n_ + i] = phi(pf_[i], du[i]);
    }
    if (gauge_) {
      double m = 0.0;
      for (std::size_t i = 0; i < n_; ++i) m += x[i];
      m = m / static_cast<double>(n_) - target_;
      for (std::size_t i = 0; i < n_; ++i) x[i] -= m;
    }
    return x;
  }

 private:
  double d_dx(std::size_t i, double t, double x, double y) const {
    const double h = 1e-7 * (1.0 + std::abs(x));
    const bool up = l_.admissible(x + h), down = l_.admissible(x - h);
    if (up && down) return (l_.eval(i, t, x + h, y) - l_.eval(i, t, x - h, y)) / (2.0 * h);
    if (up) return (l_.eval(i, t, x + h, y) - l_.eval(i, t, x, y)) / h;
    if (down) return (l_.eval(i, t, x, y) - l_.eval(i, t, x - h, y)) / h;
    return 0.0;
  }

  double d_dy(std::size_t i, double t, double x, double y) const {
    const double h = 1e-7 * (1.0 + std::abs(y));
    return (l_.eval(i, t, x, y + h) - l_.eval(i, t, x, y - h)) / (2.0 * h);
  }

  const ExponentField& pf_;
  const Rhs& l_;
  Grid grid_;
  std::size_t n_;
  double dt_;
  double base_;
  double reg_;
  bool gauge_;
  bool alternate_;
  double target_;
};

struct CorrectorOutcome {
  bool ok = false;
  Vec x;
  int iterations = 0;
  double residual = 0.0;
};

CorrectorOutcome correct(const Collocation& sys, Vec x, double lambda, double tol,
                         const HomotopyOptions& opts) {
  CorrectorOutcome out;
  Vec F;
  try {
    F = sys.residual(x, lambda);
  } catch (const DomainError&) {
    return out;
  }
  if (!F.allFinite()) return out;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  for (int it = 0;; ++it) {
    const double r = F.lpNorm<Eigen::Infinity>();
    if (r <= tol) {
      out.ok = true;
      out.x = std::move(x);
      out.iterations = it;
      out.residual = r;
      return out;
    }
    if (it >= opts.max_corrector_iterations) return out;
    SpMat J;
    try {
      J = sys.jacobian(x, lambda);
    } catch (const DomainError&) {
      return out;
    }
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) return out;
    const Vec delta = lu.solve(-F);
    if (lu.info() != Eigen::Success || !delta.allFinite()) return out;

    const double fnorm = F.norm();
    bool accepted = false;
    double s = 1.0;
    for (int k = 0; k <= 20; ++k, s *= 0.5) {
      const Vec trial = x + s * delta;
      try {
        Vec Ft = sys.residual(trial, lambda);
        if (Ft.allFinite() && Ft.norm() < fnorm) {
          x = trial;
          F = std::move(Ft);
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted) return out;
  }
}

// A few undamped-if-possible Newton steps past the tolerance, kept only while
// the sup residual keeps dropping.
void polish(const Collocation& sys, Vec& x, double lambda) {
  Vec F = sys.residual(x, lambda);
  double r = F.lpNorm<Eigen::Infinity>();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 0; it < 3 && r > 0.0; ++it) {
    lu.compute(sys.jacobian(x, lambda));
    if (lu.info() != Eigen::Success) return;
    const Vec delta = lu.solve(-F);
    if (!delta.allFinite()) return;
    try {
      const Vec trial = x + delta;
      Vec Ft = sys.residual(trial, lambda);
      const double rt = Ft.lpNorm<Eigen::Infinity>();
      if (!(rt < r)) return;
      x = trial;
      F = std::move(Ft);
      r = rt;
    } catch (const DomainError&) {
      return;
    }
  }
}

PeriodicSample lift(const ExponentField& pf, const Rhs& l, double lambda, const PeriodicSample& u) {
  return G_map(pf, l.scaled(lambda), u);
}

}  // namespace

HomotopyResult track_homotopy(const ExponentField& pf, const Rhs& l, double start, double R_bound,
                              const HomotopyOptions& opts) {
  if (!(opts.lambda0 > 0.0) || !(opts.min_step > 0.0) || !(opts.tol > 0.0))
    throw std::invalid_argument("homotopy options must be positive");
  const Collocation sys(pf, l, start, opts);
  const std::size_t n = sys.nodes();
  // Collocation rows differ from node residuals by up to twice the coupling
  // row; leave room so that the final recheck passes.
  const double tol = 0.25 * opts.tol;

  Vec x = Vec::Zero(static_cast<Eigen::Index>(sys.unknowns()));
  double lambda = 0.0;
  double step = opts.lambda0;
  Vec x_prev = x;
  double lambda_prev = 0.0;
  bool have_prev = false;
  bool escalating = true;
  HomotopyResult result{sys.sample(x), {}, start, 0.0, 0.0, 0.0, std::nullopt, {}};

  auto c1_norm = [](const PeriodicSample& s) {
    return sup_norm(s.values()) + sup_norm(s.derivative());
  };

  while (lambda < 1.0) {
    const double target = std::min(1.0, lambda + step);
    const PeriodicSample u = sys.sample(x);

    std::vector<Vec> guesses;
    if (have_prev) guesses.push_back(x + ((target - lambda) / (lambda - lambda_prev)) * (x - x_prev));
    try {
      const PeriodicSample ahead = lift(pf, l, target, u);
      if (lambda > 0.0) {
        // Shift the current point by the change of G between the two levels.
        const PeriodicSample here = lift(pf, l, lambda, u);
        std::vector<double> uu(n), dd(n);
        for (std::size_t i = 0; i < n; ++i) {
          uu[i] = u.value(i) + ahead.value(i) - here.value(i);
          dd[i] = u.derivative()[i] + ahead.derivative()[i] - here.derivative()[i];
        }
        guesses.push_back(sys.unknowns_from(uu, dd, x));
      }
      guesses.push_back(sys.unknowns_from(ahead.values(), ahead.derivative(), x));
    } catch (const Error&) {
      // The flux construction can fail far from a solution; fall through.
    }
    guesses.push_back(x);

    // Try the guesses in order of their initial residual.
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t k = 0; k < guesses.size(); ++k) {
      try {
        const Vec F = sys.residual(guesses[k], target);
        if (F.allFinite()) order.emplace_back(F.norm(), k);
      } catch (const DomainError&) {
      }
    }
    std::stable_sort(order.begin(), order.end());

    CorrectorOutcome best;
    for (const auto& [r0, k] : order) {
      best = correct(sys, guesses[k], target, tol, opts);
      if (best.ok) break;
    }

    if (!best.ok) {
      // Leaving lambda = 0 with a tiny step is the most degenerate case for
      // p != 2 (u' scales like lambda^(1/(p-1))), so the first step grows.
      // Smaller first steps are tried once the larger ones are exhausted.
      if (lambda == 0.0 && escalating) {
        if (target < 1.0) {
          step *= 4.0;
          continue;
        }
        escalating = false;
        step = opts.lambda0;
      }
      step *= 0.5;
      if (step < opts.min_step) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "continuation stalled at lambda = %.6g (step below %.1e)",
                      lambda, opts.min_step);
        throw StepCollapse(buf);
      }
      continue;
    }

    x_prev = x;
    lambda_prev = lambda;
    have_prev = lambda > 0.0;
    x = std::move(best.x);
    lambda = target;
    PeriodicSample iterate = sys.sample(x);
    if (c1_norm(iterate) > R_bound) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "iterate at lambda = %.6g has |u|_inf + |u'|_inf = %.6g above the bound %.6g",
                    lambda, c1_norm(iterate), R_bound);
      throw BoundaryHit(buf);
    }
    result.trace.push_back({lambda, std::move(iterate), step, tol, best.iterations, best.residual});
    if (best.iterations <= opts.fast_iterations) step *= 2.0;
  }

  polish(sys, x, 1.0);
  result.u = sys.sample(x);
  result.residual = bvp_residual(pf, l, result.u);
  if (sys.gauged()) {
    result.gauge_mu = x[static_cast<Eigen::Index>(2 * n)];
    if (sys.alternating()) result.gauge_nu = x[static_cast<Eigen::Index>(2 * n + 1)];
  } else if (result.residual > opts.tol) {
    throw StepCollapse("converged iterate fails the residual recheck");
  }
  return result;
}

HomotopyResult homotopy_solve(const ExponentField& pf, const Rhs& l, double R_bound,
                              const HomotopyOptions& opts) {
  const AveragedMap L(l, pf.grid());
  const ScanRange range = opts.scan ? *opts.scan : scan_range(l, R_bound);
  const auto roots = averaged_roots(L, range);
  if (roots.empty())
    throw NoBracket("averaged map has no sign change on [" + std::to_string(range.lo) + ", " +
                    std::to_string(range.hi) + "]");
  const DegreeResult deg = brouwer_degree(L, range.lo, range.hi);
  if (deg.degree == 0) throw DegreeZero("averaged map has degree 0 on the scan interval");

  HomotopyResult r = track_homotopy(pf, l, roots.front(), R_bound, opts);
  r.degree = deg;
  r.averaged_roots = roots;
  return r;
}

std::string trace_csv(const std::vector<HomotopyState>& trace) {
  std::ostringstream os;
  os << "lambda,corrector_iters,residual\n";
  char buf[96];
  for (const auto& s : trace) {
    std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", s.lambda, s.corrector_iterations, s.residual);
    os << buf;
  }
  return os.str();
}

EpsProblemResult solve_eps_problem(const ExponentField& pf, const ScalarFn& theta,
                                   const PeriodicSample& e, double eps,
                                   const HomotopyOptions& opts) {
  const Grid& grid = pf.grid();
  if (!(e.grid() == grid)) throw std::invalid_argument("forcing grid differs from exponent grid");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const double ebar = mean(grid, e.values());
  if (std::abs(ebar) > 1e-12 * (1.0 + sup_norm(e.values())))
    throw PreconditionFailed("forcing must have zero mean");

  const double e_l1 = l1_norm(grid, e.values());
  const double T = grid.period();
  const AprioriConstants c =
      compute_chain(compute_R1(T, pf.p_minus(), e_l1), T, pf.p_minus(), e_l1, e_l1, theta, eps);

  const NodalFunction ef(e);
  // (phi(u'))' = e + eps u - theta(u) u'
  const Rhs l([ef, theta, eps](double t, double x, double y) { return ef(t) + eps * x - theta(x) * y; });

  HomotopyResult run = [&] {
    HomotopyOptions o = opts;
    if (eps > 0.0) {
      o.gauge = Gauge::none;
      if (!o.scan) o.scan = ScanRange{-c.R, c.R, 512};
      return homotopy_solve(pf, l, c.R, o);
    }
    o.gauge = Gauge::zero_mean;
    o.mean_target = 0.0;
    return track_homotopy(pf, l, 0.0, c.R, o);
  }();

  EpsProblemResult out{run.u, run.residual, mean(grid, run.u.values()), c, run};
  if (eps > 0.0) {
    const double us = sup_norm(out.u.values()), ds = sup_norm(out.u.derivative());
    if (us > c.R2 + 1e-8 || ds > c.R4 + 1e-8) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "solution exceeds a priori bounds: |u| = %.6g (R2 = %.6g), |u'| = %.6g (R4 = %.6g)",
                    us, c.R2, ds, c.R4);
      throw BoundViolation(buf);
    }
  }
  return out;
}

}  // namespace plap
