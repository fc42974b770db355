#pragma once

// Lower and upper solutions for
//   (phi_{p(t)}(u'))' + f(u) u' + g(u) = h(t),
// the truncated problem they bracket, and the constructions of a constant
// lower solution and of an upper solution beta = c_delta + v_delta.

#include <vector>

#include "plap/bounds.hpp"
#include "plap/continuation.hpp"

namespace plap {

/// The data f, g, h of the equation. h is sampled on the exponent grid.
struct Problem {
  ExponentField pf;
  ScalarFn f;
  ScalarFn g;
  PeriodicSample h;
};

/// l(t, x, y) = h(t) - g(x) - f(x) y, admissible for x > 0.
Rhs original_rhs(const Problem& prob);

class BracketPair {
 public:
  /// Requires both channels, alpha <= beta and alpha > 0 at every node.
  BracketPair(PeriodicSample alpha, PeriodicSample beta);

  const PeriodicSample& alpha() const noexcept { return alpha_; }
  const PeriodicSample& beta() const noexcept { return beta_; }
  const Grid& grid() const noexcept { return alpha_.grid(); }

  /// Clamp of x to [alpha_i, beta_i].
  double gamma(std::size_t node, double x) const;
  /// Clamp of x to [alpha(t), beta(t)] with piecewise-linear interpolation.
  double gamma_at(double t, double x) const;

 private:
  PeriodicSample alpha_, beta_;
  NodalFunction alpha_fn_, beta_fn_;
};

/// l*(t, x, y) = h(t) - g(gamma(t, x)) - f(gamma(t, x)) y + x - gamma(t, x).
/// Defined for every real x.
Rhs modified_rhs(const Problem& prob, const BracketPair& pair);

struct MarginReport {
  bool passed;
  /// r_i = (phi(w'))'_i + f(w_i) w'_i + g(w_i) - h_i at nodes 1..N-1.
  std::vector<double> residuals;
  double min_residual, max_residual;
  double endpoint_gap;  // w'(0) - w'(T)
  bool endpoint_ok;
};

/// Lower: min r >= -tol and alpha'(0) >= alpha'(T) - tol. Throws DomainError
/// if the candidate leaves (0, inf).
MarginReport verify_lower(const Problem& prob, const PeriodicSample& alpha, double tol = 1e-9);
/// Upper: max r <= tol and beta'(0) <= beta'(T) + tol.
MarginReport verify_upper(const Problem& prob, const PeriodicSample& beta, double tol = 1e-9);

struct BracketedSolution {
  PeriodicSample u;
  double residual;           // original equation
  double modified_residual;  // truncated equation
  double bracket_tol;
  BracketBounds bounds;
  HomotopyResult run;
};

/// Solves the truncated problem by continuation inside the ball given by
/// M1, M2 and checks alpha - tol <= u <= beta + tol with tol = 1e-8 (1 + |beta|_inf)
/// and the residual of the original equation. Throws PreconditionFailed when
/// either side fails verification, BracketViolation on an escape.
BracketedSolution solve_bracketed(const Problem& prob, const BracketPair& pair,
                                  const HomotopyOptions& opts = {});

/// Largest point x of the log-spaced grid on [x_min, x_max] (n points) with
/// g(x) >= h_max. Throws NotFound if none qualifies.
double find_constant_lower(const ScalarFn& g, double h_max, double x_min, double x_max, int n);

struct UpperConstruction {
  PeriodicSample beta;
  PeriodicSample v_delta;
  double c_delta;
  double K;
  double hbar;
  AprioriConstants chain;  // of the auxiliary zero-mean problem
  MarginReport check;
};

/// f0(x) = f(x) for x >= 0 and f(0) otherwise.
ScalarFn freeze_negative(const ScalarFn& f);

/// beta = c_delta + v_delta with c_delta = delta + K, K from the uniform bound
/// for |h~|_{L1}, and v_delta the zero-mean solution of
///   (phi(v'))' + f0(c_delta + v) v' = h~(t).
/// Throws TailCheckFailed when g(x) < mean(h) fails on a sample of
/// [delta, delta + 10 K], BoundViolation when beta < delta - 1e-10 somewhere,
/// and PreconditionFailed when beta does not verify as an upper solution.
UpperConstruction build_upper(const Problem& prob, double delta, const HomotopyOptions& opts = {});

}  // namespace plap
