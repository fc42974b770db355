#include "plap/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "plap/error.hpp"

namespace plap {

FdSystem::FdSystem(const ExponentField& pf, double eps_reg)
    : grid_(pf.grid()), p_mid_(pf.grid().intervals()), eps_reg_(eps_reg) {
  for (std::size_t i = 0; i < p_mid_.size(); ++i) p_mid_[i] = pf.midpoint(i);
}

std::vector<double> CyclicTridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = lower[i] * x[(i + n - 1) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n];
  return y;
}

namespace {

// u_i = base + v_i; differences are taken on v.
std::vector<double> residual_offset(const FdSystem& sys, std::span<const double> v, double base,
                                    const Rhs& l) {
  const std::size_t n = sys.unknowns();
  if (v.size() != n) throw std::invalid_argument("oracle: unknown count mismatch");
  const double h = sys.grid().step();
  const auto pm = sys.midpoint_exponents();
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = phi(pm[i], (v[(i + 1) % n] - v[i]) / h);
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n, next = (i + 1) % n;
    const double y = (v[next] - v[prev]) / (2.0 * h);
    F[i] = (flux[i] - flux[prev]) / h - l.eval(i, sys.grid().node(i), base + v[i], y);
  }
  return F;
}

CyclicTridiagonal jacobian_offset(const FdSystem& sys, std::span<const double> v, double base,
                                  const Rhs& l) {
  const std::size_t n = sys.unknowns();
  const double h = sys.grid().step();
  const auto pm = sys.midpoint_exponents();
  std::vector<double> slope(n);
  for (std::size_t i = 0; i < n; ++i)
    slope[i] = phi_slope(pm[i], (v[(i + 1) % n] - v[i]) / h, sys.eps_reg());
  CyclicTridiagonal J{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n, next = (i + 1) % n;
    const double t = sys.grid().node(i);
    const double x = base + v[i];
    const double y = (v[next] - v[prev]) / (2.0 * h);

    const double hx = 1e-7 * (1.0 + std::abs(x));
    double lx;
    const bool up = l.admissible(x + hx), down = l.admissible(x - hx);
    if (up && down)
      lx = (l.eval(i, t, x + hx, y) - l.eval(i, t, x - hx, y)) / (2.0 * hx);
    else if (up)
      lx = (l.eval(i, t, x + hx, y) - l.eval(i, t, x, y)) / hx;
    else
      lx = (l.eval(i, t, x, y) - l.eval(i, t, x - hx, y)) / hx;
    const double hy = 1e-7 * (1.0 + std::abs(y));
    const double ly = (l.eval(i, t, x, y + hy) - l.eval(i, t, x, y - hy)) / (2.0 * hy);

    J.upper[i] = slope[i] / (h * h) - ly / (2.0 * h);
    J.lower[i] = slope[prev] / (h * h) + ly / (2.0 * h);
    J.diag[i] = -(slope[i] + slope[prev]) / (h * h) - lx;
  }
  return J;
}

void thomas(std::span<const double> a, std::span<const double> b, std::span<const double> c,
            std::span<const double> r, std::vector<double>& x) {
  const std::size_t n = b.size();
  std::vector<double> gam(n);
  x.assign(n, 0.0);
  double bet = b[0];
  if (bet == 0.0 || !std::isfinite(bet)) throw SingularJacobian("zero pivot in tridiagonal solve");
  x[0] = r[0] / bet;
  for (std::size_t j = 1; j < n; ++j) {
    gam[j] = c[j - 1] / bet;
    bet = b[j] - a[j] * gam[j];
    if (bet == 0.0 || !std::isfinite(bet)) throw SingularJacobian("zero pivot in tridiagonal solve");
    x[j] = (r[j] - a[j] * x[j - 1]) / bet;
  }
  for (std::size_t j = n - 1; j-- > 0;) x[j] -= gam[j + 1] * x[j + 1];
}

double sup(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

std::vector<double> fd_residual(const FdSystem& sys, std::span<const double> u, const Rhs& l) {
  return residual_offset(sys, u, 0.0, l);
}

CyclicTridiagonal fd_jacobian(const FdSystem& sys, std::span<const double> u, const Rhs& l) {
  return jacobian_offset(sys, u, 0.0, l);
}

std::vector<double> solve_cyclic(const CyclicTridiagonal& A, std::span<const double> rhs) {
  const std::size_t n = A.size();
  if (n < 3 || rhs.size() != n) throw std::invalid_argument("cyclic solve: bad dimensions");
  const double alpha = A.upper[n - 1];  // A(n-1, 0)
  const double beta = A.lower[0];       // A(0, n-1)
  const double gamma = A.diag[0] != 0.0 ? -A.diag[0] : -1.0;

  std::vector<double> b(A.diag);
  b[0] -= gamma;
  b[n - 1] -= alpha * beta / gamma;
  // Thomas wants a[j] = A(j, j-1) and c[j] = A(j, j+1) without the corners.
  std::vector<double> x, z;
  thomas(A.lower, b, A.upper, rhs, x);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  thomas(A.lower, b, A.upper, u, z);
  const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
  if (denom == 0.0 || !std::isfinite(denom)) throw SingularJacobian("singular rank-one correction");
  const double fact = (x[0] + beta * x[n - 1] / gamma) / denom;
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  for (double xi : x)
    if (!std::isfinite(xi)) throw SingularJacobian("non-finite cyclic solve");
  return x;
}

std::vector<double> solve_dense(const CyclicTridiagonal& A, std::span<const double> rhs) {
  const auto n = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, (i + n - 1) % n) += A.lower[static_cast<std::size_t>(i)];
    M(i, i) += A.diag[static_cast<std::size_t>(i)];
    M(i, (i + 1) % n) += A.upper[static_cast<std::size_t>(i)];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw SingularJacobian("Jacobian is rank deficient");
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  const Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw SingularJacobian("non-finite dense solve");
  return {x.data(), x.data() + n};
}

NewtonResult newton_solve(const FdSystem& sys, const Rhs& l, const PeriodicSample& init,
                          const NewtonOptions& opts) {
  const Grid& grid = sys.grid();
  if (!(init.grid() == grid)) throw std::invalid_argument("oracle: init grid mismatch");
  const std::size_t n = sys.unknowns();
  const double base = init.value(0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = init.value(i) - base;

  auto norm2 = [](const std::vector<double>& F) {
    double s = 0.0;
    for (double x : F) s += x * x;
    return std::sqrt(s);
  };

  std::vector<double> F = residual_offset(sys, v, base, l);
  int it = 0;
  for (;; ++it) {
    if (sup(F) <= opts.tol) break;
    if (it >= opts.max_iterations)
      throw MaxIter("oracle Newton did not reach tolerance (residual " + std::to_string(sup(F)) + ")");
    const CyclicTridiagonal J = jacobian_offset(sys, v, base, l);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -F[i];
    std::vector<double> delta;
    try {
      delta = solve_cyclic(J, rhs);
      const auto back = J.multiply(delta);
      double defect = 0.0;
      for (std::size_t i = 0; i < n; ++i) defect = std::max(defect, std::abs(back[i] - rhs[i]));
      if (defect > 1e-6 * (sup(rhs) + 1e-300)) delta = solve_dense(J, rhs);
    } catch (const SingularJacobian&) {
      delta = solve_dense(J, rhs);
    }

    const double f0 = norm2(F);
    double s = 1.0;
    bool accepted = false;
    for (int k = 0; k <= 20; ++k, s *= 0.5) {
      std::vector<double> trial(v);
      for (std::size_t i = 0; i < n; ++i) trial[i] += s * delta[i];
      try {
        auto Ft = residual_offset(sys, trial, base, l);
        if (norm2(Ft) < f0) {
          v = std::move(trial);
          F = std::move(Ft);
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted)
      throw MaxIter("oracle Newton stalled at residual " + std::to_string(sup(F)));
  }

  const double h = grid.step();
  std::vector<double> u(n + 1), du(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = base + v[i];
    du[i] = (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * h);
  }
  u[n] = u[0];
  du[n] = du[0];
  return {PeriodicSample(grid, std::move(u), std::move(du)), it, sup(F)};
}

}  // namespace plap
