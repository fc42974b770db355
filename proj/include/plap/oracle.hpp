#pragma once

// Independent finite-difference Newton solver for
// (phi_{p(t)}(u'))' = l(t, u, u') on the periodic grid, used as a cross-check.
// Flux form with midpoint exponents:
//   F_i = [phi_{p_{i+1/2}}((u_{i+1} - u_i)/h) - phi_{p_{i-1/2}}((u_i - u_{i-1})/h)] / h
//         - l(t_i, u_i, (u_{i+1} - u_{i-1}) / (2h)).

#include <span>
#include <vector>

#include "plap/halflinear.hpp"

namespace plap {

class FdSystem {
 public:
  explicit FdSystem(const ExponentField& pf, double eps_reg = 1e-10);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t unknowns() const noexcept { return grid_.intervals(); }
  /// p_{i+1/2}, i = 0..N-1.
  std::span<const double> midpoint_exponents() const noexcept { return p_mid_; }
  double eps_reg() const noexcept { return eps_reg_; }

 private:
  Grid grid_;
  std::vector<double> p_mid_;
  double eps_reg_;
};

/// A(i, i-1) = lower[i], A(i, i) = diag[i], A(i, i+1) = upper[i], indices mod n.
struct CyclicTridiagonal {
  std::vector<double> lower, diag, upper;

  std::size_t size() const noexcept { return diag.size(); }
  std::vector<double> multiply(std::span<const double> x) const;
};

/// u holds the N distinct node values.
std::vector<double> fd_residual(const FdSystem& sys, std::span<const double> u, const Rhs& l);

CyclicTridiagonal fd_jacobian(const FdSystem& sys, std::span<const double> u, const Rhs& l);

/// Thomas elimination plus a rank-one correction for the corners.
/// Throws SingularJacobian on a zero pivot or a non-finite result.
std::vector<double> solve_cyclic(const CyclicTridiagonal& A, std::span<const double> rhs);
/// Dense LU; throws SingularJacobian when A is rank deficient.
std::vector<double> solve_dense(const CyclicTridiagonal& A, std::span<const double> rhs);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 60;
};

struct NewtonResult {
  PeriodicSample u;  // derivative channel: centered differences
  int iterations;
  double residual;   // sup |F|
};

/// Damped Newton (up to 20 step halvings on residual increase).
/// Throws MaxIter, SingularJacobian, and DomainError if init is inadmissible.
NewtonResult newton_solve(const FdSystem& sys, const Rhs& l, const PeriodicSample& init,
                          const NewtonOptions& opts = {});

}  // namespace plap
