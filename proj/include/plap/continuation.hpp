#pragma once

// Averaged map, 1-D degree, and lambda-homotopy path following for
// (phi_{p(t)}(u'))' = lambda l(t, u, u').

#include <optional>
#include <string>
#include <vector>

#include "plap/bounds.hpp"
#include "plap/halflinear.hpp"

namespace plap {

/// L(a) = (1/T) * trapezoid integral of l(t, a, 0) over one period.
class AveragedMap {
 public:
  AveragedMap(Rhs l, Grid grid);
  double operator()(double a) const;
  const Rhs& rhs() const noexcept { return l_; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  Rhs l_;
  Grid grid_;
};

double averaged_eval(const AveragedMap& L, double a);

/// Scan interval for averaged roots: log-spaced when lo > 0, linear otherwise.
struct ScanRange {
  double lo, hi;
  int points = 512;
};

/// Default scan range: the part of (-R, R) inside the admissible interval of l,
/// pulled in from open guard ends.
ScanRange scan_range(const Rhs& l, double R);

/// All sign changes of L on the scan grid, each refined by bisection, ascending.
std::vector<double> averaged_roots(const AveragedMap& L, const ScanRange& range);
/// Smallest root. Throws NoBracket when the scan sees no sign change.
double averaged_root(const AveragedMap& L, const ScanRange& range);

struct DegreeResult {
  double lo, hi;
  int sign_left, sign_right;
  int degree;
};

/// Degree of L on (lo, hi). Throws BoundaryZero if L vanishes at an endpoint.
DegreeResult brouwer_degree(const AveragedMap& L, double lo, double hi);
/// Degree on (-R, R).
DegreeResult brouwer_degree(const AveragedMap& L, double R);

enum class Gauge {
  none,
  /// Pins the discrete mean to mean_target and removes the alternating
  /// (-1)^i mode with two multipliers. For problems where l does not depend
  /// on the mean, such as the eps = 0 family.
  zero_mean,
};

struct HomotopyOptions {
  double tol = 1e-8;
  double lambda0 = 1e-3;
  double min_step = 1e-6;
  int fast_iterations = 4;
  int max_corrector_iterations = 15;
  double jacobian_reg = 1e-10;
  Gauge gauge = Gauge::none;
  double mean_target = 0.0;
  std::optional<ScanRange> scan;  // overrides scan_range(l, R_bound)
};

struct HomotopyState {
  double lambda;
  PeriodicSample iterate;
  double step;
  double corrector_tol;
  int corrector_iterations;
  double residual;
};

struct HomotopyResult {
  PeriodicSample u;
  std::vector<HomotopyState> trace;
  double start;
  /// bvp_residual of the returned u for l. With Gauge::zero_mean this is the
  /// residual of the unconstrained equation and includes the multipliers.
  double residual;
  double gauge_mu = 0.0, gauge_nu = 0.0;
  std::optional<DegreeResult> degree;
  std::vector<double> averaged_roots;
};

/// Averaged root, degree gate, then track_homotopy from the smallest root.
/// Throws NoBracket, BoundaryZero, DegreeZero, StepCollapse, BoundaryHit.
HomotopyResult homotopy_solve(const ExponentField& pf, const Rhs& l, double R_bound,
                              const HomotopyOptions& opts = {});

/// Path following from u = start at lambda = 0 to lambda = 1 without the
/// degree gate. The corrector is damped Newton on node values and fluxes
/// q = phi(u') together; u' is phi_inv(q) where p < 2 and the centered
/// difference of u elsewhere.
HomotopyResult track_homotopy(const ExponentField& pf, const Rhs& l, double start, double R_bound,
                              const HomotopyOptions& opts = {});

/// "lambda,corrector_iters,residual" rows.
std::string trace_csv(const std::vector<HomotopyState>& trace);

struct EpsProblemResult {
  PeriodicSample u;
  double residual;
  double mean;
  AprioriConstants bounds;
  HomotopyResult run;
};

/// (phi_{p(t)}(u'))' + theta(u) u' - eps u = e(t) with mean(e) = 0, eps >= 0.
/// eps = 0 is solved in the zero-mean gauge. Throws BoundViolation when
/// eps > 0 and the solution leaves the R2 / R4 bounds.
EpsProblemResult solve_eps_problem(const ExponentField& pf, const ScalarFn& theta,
                                   const PeriodicSample& e, double eps,
                                   const HomotopyOptions& opts = {});

}  // namespace plap
