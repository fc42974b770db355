#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plap/error.hpp"
#include "plap/oracle.hpp"

using namespace plap;
using std::numbers::pi;

namespace {

Rhs singular_rhs(double hbar, double amp) {
  return Rhs([=](double t, double x, double) { return 1.0 / x - hbar - amp * std::cos(2 * pi * t); }, 0.0);
}

std::vector<double> nodes(const PeriodicSample& s) {
  const auto v = s.values();
  return {v.begin(), v.end() - 1};
}

}  // namespace

TEST_CASE("residual vanishes at the equilibrium") {
  const Grid g(1.0, 64);
  const FdSystem sys(ExponentField::from_function(g, [](double t) { return 3 + std::sin(2 * pi * t); }));
  CHECK(sys.unknowns() == 64);
  CHECK(sys.midpoint_exponents().size() == 64);
  const std::vector<double> one(64, 1.0);
  for (double r : fd_residual(sys, one, singular_rhs(1.0, 0.0))) CHECK(r == 0.0);
}

TEST_CASE("perturbing one node changes exactly three residual entries") {
  const Grid g(1.0, 32);
  const FdSystem sys(ExponentField::constant(g, 2.5));
  const Rhs l([](double t, double x, double y) { return std::sin(2 * pi * t) + x * x + y; });
  std::vector<double> u(32);
  for (std::size_t i = 0; i < 32; ++i) u[i] = 1 + 0.3 * std::cos(2 * pi * g.node(i));
  const auto F0 = fd_residual(sys, u, l);
  for (std::size_t j : {0u, 7u, 31u}) {
    auto v = u;
    v[j] += 0.01;
    const auto F1 = fd_residual(sys, v, l);
    int changed = 0;
    for (std::size_t i = 0; i < 32; ++i) {
      const bool near = i == j || i == (j + 1) % 32 || i == (j + 31) % 32;
      if (F1[i] != F0[i]) {
        ++changed;
        CHECK(near);
      }
    }
    CHECK(changed == 3);
  }
}

TEST_CASE("jacobian matches directional differences on random configurations") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Grid g(0.5 + std::abs(c(rng)), 64);
    const double p0 = 1.5 + 2.5 * std::abs(c(rng)), amp = 0.2 * std::abs(c(rng));
    const FdSystem sys(ExponentField::from_function(
        g, [&](double t) { return std::max(1.2, p0 + amp * std::sin(2 * pi * t / g.period())); }));
    const double a = c(rng), b = c(rng), e = c(rng);
    const Rhs l([=](double t, double x, double y) { return e * std::cos(t) - 1.0 / x + a * x * y + b * y * y; }, 0.0);
    std::vector<double> u(64), d(64);
    const double s1 = c(rng), s2 = c(rng);
    for (std::size_t i = 0; i < 64; ++i) {
      const double t = 2 * pi * g.node(i) / g.period();
      u[i] = 2 + s1 * std::sin(t) + 0.5 * s2 * std::cos(2 * t) + 0.1 * std::sin(3 * t);
      d[i] = c(rng);
    }
    const auto J = fd_jacobian(sys, u, l);
    const auto Jd = J.multiply(d);
    const double s = 1e-6;
    auto up = u, dn = u;
    for (std::size_t i = 0; i < 64; ++i) up[i] += s * d[i], dn[i] -= s * d[i];
    const auto Fp = fd_residual(sys, up, l), Fm = fd_residual(sys, dn, l);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
      err = std::max(err, std::abs((Fp[i] - Fm[i]) / (2 * s) - Jd[i]));
      scale = std::max(scale, std::abs(Jd[i]));
    }
    CHECK(err <= 1e-5 * (1 + scale));
  }
}

TEST_CASE("p = 2 jacobian is the periodic laplacian stencil") {
  const Grid g(1.0, 16);
  const FdSystem sys(ExponentField::constant(g, 2.0));
  const std::vector<double> u(16, 0.3);
  const auto J = fd_jacobian(sys, u, Rhs([](double, double, double) { return 0.0; }));
  const double h2 = g.step() * g.step();
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(J.lower[i] == doctest::Approx(1 / h2).epsilon(1e-12));
    CHECK(J.diag[i] == doctest::Approx(-2 / h2).epsilon(1e-12));
    CHECK(J.upper[i] == doctest::Approx(1 / h2).epsilon(1e-12));
  }

  const Rhs lx([](double, double x, double) { return std::exp(x); });
  std::vector<double> v(16);
  for (std::size_t i = 0; i < 16; ++i) v[i] = std::sin(2 * pi * g.node(i));
  const auto S = fd_jacobian(sys, v, lx);
  for (std::size_t i = 0; i < 16; ++i) CHECK(S.upper[i] == doctest::Approx(S.lower[(i + 1) % 16]).epsilon(1e-12));
}

TEST_CASE("second order convergence on a manufactured solution") {
  // u* = 1 + 0.2 sin(2 pi t), p = 3, l = (phi(u*'))' + u - u*.
  const auto ustar = [](double t) { return 1 + 0.2 * std::sin(2 * pi * t); };
  const Rhs l(
      [&](double t, double x, double) {
        const double d = 0.4 * pi * std::cos(2 * pi * t);
        const double dd = -0.8 * pi * pi * std::sin(2 * pi * t);
        return 2 * std::abs(d) * dd + x - ustar(t);
      },
      0.0);
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const Grid g(1.0, n);
    const auto r = newton_solve(FdSystem(ExponentField::constant(g, 3.0)), l, PeriodicSample::constant(g, 1.0));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(r.u.value(i) - ustar(g.node(i))));
    if (prev > 0.0) {
      CHECK(prev / err >= 3.5);
      CHECK(prev / err <= 4.5);
    }
    prev = err;
  }
}

TEST_CASE("newton examples") {
  const Grid g(1.0, 128);
  const FdSystem sys(ExponentField::from_function(g, [](double t) { return 3 + std::sin(2 * pi * t); }));
  const auto r = newton_solve(sys, singular_rhs(1.0, 0.0), PeriodicSample::constant(g, 1.2));
  CHECK(r.residual <= 1e-10);
  for (double x : r.u.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
  const auto z = newton_solve(sys, singular_rhs(1.0, 0.0), PeriodicSample::constant(g, 1.0));
  CHECK(z.iterations == 0);
  CHECK_THROWS_AS(newton_solve(sys, singular_rhs(1.0, 0.0), PeriodicSample::constant(g, -1.0)), DomainError);

  const auto f = newton_solve(FdSystem(ExponentField::constant(g, 2.0)), singular_rhs(1.0, 0.1),
                              PeriodicSample::constant(g, 1.2));
  const auto F = fd_residual(FdSystem(ExponentField::constant(g, 2.0)), nodes(f.u), singular_rhs(1.0, 0.1));
  CHECK(f.residual <= 1e-10);
  CHECK(sup_norm(F) <= 1e-10);
}

TEST_CASE("cyclic and dense solves agree") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (std::size_t n : {3u, 5u, 64u}) {
    CyclicTridiagonal A{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      A.lower[i] = c(rng);
      A.upper[i] = c(rng);
      A.diag[i] = 3 + c(rng);
      b[i] = c(rng);
    }
    const auto x1 = solve_cyclic(A, b), x2 = solve_dense(A, b);
    const auto Ax = A.multiply(x1);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-12));
      CHECK(Ax[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
  // Periodic laplacian annihilates constants.
  const std::size_t n = 8;
  const CyclicTridiagonal L{std::vector<double>(n, 1.0), std::vector<double>(n, -2.0), std::vector<double>(n, 1.0)};
  CHECK_THROWS_AS(solve_dense(L, std::vector<double>(n, 1.0)), SingularJacobian);
}
