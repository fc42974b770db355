#pragma once

// The periodic solution operator K of (phi_{p(t)}(u'))' = w, the projectors
// P and Q, the Nemytskii map and the fixed-point map G = P + QN + KN.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "plap/periodic.hpp"

namespace plap {

/// Right-hand side l(t, x, y) of (phi_{p(t)}(u'))' = l(t, u, u').
/// Evaluation is admissible only for x in the open interval (x_lo, x_hi);
/// outside of it, or on a non-finite result, evaluation raises DomainError.
class Rhs {
 public:
  using Fn = std::function<double(double t, double x, double y)>;

  Rhs() = default;
  explicit Rhs(Fn fn, double x_lo = -std::numeric_limits<double>::infinity(),
               double x_hi = std::numeric_limits<double>::infinity());

  /// `node` is reported in DomainError.
  double eval(std::size_t node, double t, double x, double y) const;
  double operator()(double t, double x, double y) const { return eval(npos, t, x, y); }

  bool admissible(double x) const noexcept { return x > x_lo_ && x < x_hi_; }
  double x_lo() const noexcept { return x_lo_; }
  double x_hi() const noexcept { return x_hi_; }

  /// l scaled by a constant factor (the homotopy family lambda * l).
  Rhs scaled(double lambda) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Fn fn_;
  double x_lo_ = -std::numeric_limits<double>::infinity();
  double x_hi_ = std::numeric_limits<double>::infinity();
};

/// Periodic piecewise-linear interpolant of closed-grid samples; exact at nodes.
class NodalFunction {
 public:
  NodalFunction(Grid grid, std::vector<double> values);
  explicit NodalFunction(const PeriodicSample& s);
  double operator()(double t) const;
  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Rhs l(t, x, y) = w(t) backed by a sample.
Rhs forcing_rhs(const PeriodicSample& w);

struct OperatorResult {
  PeriodicSample u;  // values and derivative; u(0) = 0
  double a_star;     // flux constant
  double residual;   // sup node residual of (phi(u'))' = w - mean(w)
};

/// N_l(v)(t_i) = l(t_i, v_i, v'_i). Needs both channels.
PeriodicSample nemytskii(const Rhs& l, const PeriodicSample& v);

/// Constant sample v(0) (with zero derivative).
PeriodicSample proj_P(const PeriodicSample& v);
/// Constant sample equal to the trapezoid mean of w.
PeriodicSample proj_Q(const PeriodicSample& w);

/// A(a) = integral of phi_inv(p(s), a + W(s)) over one period.
double flux_balance(const ExponentField& pf, std::span<const double> wtilde, double a);

/// Unique a with A(a) = 0. Geometric bracket expansion from [-1, 1] up to
/// |a| = 1e12, then bisection to full double precision.
double solve_flux_constant(const ExponentField& pf, std::span<const double> wtilde);

/// Periodic solution of (phi_{p(t)}(u'))' = w - mean(w) with u(0) = 0:
/// u' = phi_inv(a + W), W the running integral of w - mean(w).
OperatorResult K_op(const ExponentField& pf, const PeriodicSample& w);

/// G(v) = P v + Q N(v) + K N(v).
PeriodicSample G_map(const ExponentField& pf, const Rhs& l, const PeriodicSample& v);

/// Node residuals (phi(u'_{i+1}) - phi(u'_{i-1})) / (2 dt) - l(t_i, u_i, u'_i) on the
/// periodic grid, using the derivative channel. Entry N repeats entry 0.
std::vector<double> node_residuals(const ExponentField& pf, const Rhs& l, const PeriodicSample& u);

/// Sup of |node_residuals| over the N distinct nodes of the periodic grid.
double bvp_residual(const ExponentField& pf, const Rhs& l, const PeriodicSample& u);

}  // namespace plap
