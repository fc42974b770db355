#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plap/error.hpp"
#include "plap/lower_upper.hpp"
#include "plap/oracle.hpp"

using namespace plap;
using std::numbers::pi;

namespace {

Problem make(const Grid& g, double p, ScalarFn f, double hbar, double amp) {
  return Problem{ExponentField::constant(g, p), std::move(f), [](double x) { return 1.0 / x; },
                 PeriodicSample::from_function(g, [=](double t) { return hbar + amp * std::cos(2 * pi * t); })};
}

ScalarFn zero() {
  return [](double) { return 0.0; };
}

}  // namespace

TEST_CASE("gamma clamps to the bracket and is idempotent") {
  const Grid g(1.0, 32);
  const BracketPair pair(PeriodicSample::constant(g, 1.0), PeriodicSample::constant(g, 2.0));
  CHECK(pair.gamma(3, 0.5) == 1.0);
  CHECK(pair.gamma(3, 1.5) == 1.5);
  CHECK(pair.gamma(3, 3.0) == 2.0);
  CHECK(pair.gamma_at(0.37, -4.0) == 1.0);
  for (double x : {-10.0, 0.0, 1.2, 1.99, 7.0}) {
    CHECK(pair.gamma(5, pair.gamma(5, x)) == pair.gamma(5, x));
    CHECK(pair.gamma_at(0.61, pair.gamma_at(0.61, x)) == pair.gamma_at(0.61, x));
  }
}

TEST_CASE("bracket pair rejects bad input") {
  const Grid g(1.0, 32);
  CHECK_THROWS_AS(BracketPair(PeriodicSample::constant(g, 2.0), PeriodicSample::constant(g, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(BracketPair(PeriodicSample::constant(g, 0.0), PeriodicSample::constant(g, 1.0)), DomainError);
}

TEST_CASE("modified rhs agrees with the original inside the bracket") {
  const Grid g(1.0, 64);
  const Problem prob = make(g, 3.0, [](double x) { return std::sin(x); }, 1.0, 0.2);
  const BracketPair pair(PeriodicSample::constant(g, 0.5), PeriodicSample::constant(g, 2.0));
  const Rhs l = original_rhs(prob), ls = modified_rhs(prob, pair);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> x(0.5, 2.0), y(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const std::size_t i = k % g.size();
    const double xv = x(rng), yv = y(rng);
    const double a = l.eval(i, g.node(i), xv, yv);
    CHECK(std::abs(ls.eval(i, g.node(i), xv, yv) - a) <= 1e-14 * (1 + std::abs(a)));
  }
  CHECK_NOTHROW(ls.eval(0, 0.0, -3.0, 0.0));
}

TEST_CASE("modified rhs obeys the linear growth bound on |x| <= M1") {
  const Grid g(1.0, 64);
  const Problem prob = make(g, 2.5, [](double x) { return x; }, 1.0, 0.3);
  const auto a = PeriodicSample::constant(g, 0.5), b = PeriodicSample::constant(g, 2.0);
  const BracketPair pair(a, b);
  const auto hv = prob.h.values();
  const double M1 = compute_M1(a.values(), b.values(), hv, prob.g);
  const auto bb = compute_c3_M2(M1, prob.f, prob.g, a.values(), b.values(), hv, 1.0, 2.5, 2.5);
  const Rhs ls = modified_rhs(prob, pair);
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> x(-M1, M1), y(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t i = k % g.size();
    const double yv = y(rng);
    CHECK(std::abs(ls.eval(i, g.node(i), x(rng), yv)) <= bb.c3 * (1 + std::abs(yv)));
  }
}

TEST_CASE("verify lower and upper examples") {
  const Grid g(1.0, 64);
  const Problem prob = make(g, 3.0, zero(), 1.0, 0.0);
  const auto lo = verify_lower(prob, PeriodicSample::constant(g, 0.5));
  CHECK(lo.passed);
  CHECK(lo.min_residual == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lo.endpoint_ok);
  CHECK_FALSE(verify_lower(prob, PeriodicSample::constant(g, 2.0)).passed);
  const auto up = verify_upper(prob, PeriodicSample::constant(g, 2.0));
  CHECK(up.passed);
  CHECK(up.max_residual == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_FALSE(verify_upper(prob, PeriodicSample::constant(g, 0.5)).passed);
  CHECK_THROWS_AS(verify_lower(prob, PeriodicSample::constant(g, -1.0)), DomainError);
}

TEST_CASE("bracketed solve at the equilibrium") {
  const Grid g(1.0, 128);
  Problem prob = make(g, 3.0, zero(), 1.0, 0.0);
  prob.pf = ExponentField::from_function(g, [](double t) { return 3 + std::sin(2 * pi * t); });
  const BracketPair pair(PeriodicSample::constant(g, 0.5), PeriodicSample::constant(g, 2.0));
  const auto s = solve_bracketed(prob, pair);
  CHECK(s.residual <= 1e-12);
  for (double x : s.u.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bracketed solve matches the oracle for p = 2") {
  const Grid g(1.0, 512);
  const Problem prob = make(g, 2.0, zero(), 1.0, 0.1);
  const BracketPair pair(PeriodicSample::constant(g, 0.5), PeriodicSample::constant(g, 2.0));
  const auto s = solve_bracketed(prob, pair);
  CHECK(s.residual <= 1e-8);
  const auto orc = newton_solve(FdSystem(prob.pf), original_rhs(prob), PeriodicSample::constant(g, 1.2), {1e-10, 60});
  double diff = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    diff = std::max(diff, std::abs(orc.u.value(i) - s.u.value(i)));
    CHECK(s.u.value(i) >= 0.5 - s.bracket_tol);
    CHECK(s.u.value(i) <= 2.0 + s.bracket_tol);
  }
  CHECK(diff <= 1e-5);
}

TEST_CASE("bracketed solve rejects a bracket that does not verify") {
  const Grid g(1.0, 64);
  const Problem prob = make(g, 2.0, zero(), 1.0, 0.1);
  CHECK_THROWS_AS(solve_bracketed(prob, BracketPair(PeriodicSample::constant(g, 1.5), PeriodicSample::constant(g, 2.0))),
                  PreconditionFailed);
  CHECK_THROWS_AS(solve_bracketed(prob, BracketPair(PeriodicSample::constant(g, 0.5), PeriodicSample::constant(g, 0.8))),
                  PreconditionFailed);
}

TEST_CASE("constant lower search") {
  const auto g = [](double x) { return 1.0 / x; };
  const int n = 200;
  const double x = find_constant_lower(g, 1.1, 1e-6, 10.0, n);
  const double ratio = std::pow(1e7, 1.0 / (n - 1));
  CHECK(g(x) >= 1.1);
  CHECK(g(x * ratio * (1 + 1e-12)) < 1.1);
  CHECK_THROWS_AS(find_constant_lower([](double) { return -1.0; }, 1.0, 1e-6, 10.0, n), NotFound);
  CHECK_THROWS_AS(find_constant_lower(g, 1.0, 2.0, 1.0, n), std::invalid_argument);
}

TEST_CASE("upper construction for p = 2 without damping") {
  const Grid g(1.0, 512);
  const Problem prob = make(g, 2.0, zero(), 1.0, 0.1);
  const double delta = 1.01;
  const auto u = build_upper(prob, delta);
  // v'' = 0.1 cos(2 pi t) with zero mean has amplitude 0.1 / (4 pi^2).
  const double amp = 0.1 / (4 * pi * pi);
  CHECK(amp == doctest::Approx(0.00253302959105844).epsilon(1e-14));
  CHECK(sup_norm(u.v_delta.values()) == doctest::Approx(amp).epsilon(1e-4));
  CHECK(u.c_delta == doctest::Approx(delta + u.K).epsilon(1e-15));
  CHECK(u.hbar == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.check.passed);
  for (double b : u.beta.values()) CHECK(b >= delta - 1e-10);
}

TEST_CASE("upper construction with constant forcing and with damping") {
  const Grid g(1.0, 256);
  const auto c = build_upper(make(g, 3.0, zero(), 1.0, 0.0), 1.5);
  CHECK(sup_norm(c.v_delta.values()) <= 1e-12);
  CHECK(c.K == doctest::Approx(1.0).epsilon(1e-12));

  Problem damped = make(g, 3.0, [](double x) { return x; }, 0.5, 0.1);
  damped.pf = ExponentField::from_function(g, [](double t) { return 3 + std::sin(2 * pi * t); });
  const auto d = build_upper(damped, 2.5);
  CHECK(d.check.passed);
  for (double b : d.beta.values()) CHECK(b >= 2.5 - 1e-10);
}

TEST_CASE("upper construction checks the tail") {
  const Grid g(1.0, 64);
  CHECK_THROWS_AS(build_upper(make(g, 2.0, zero(), 1.0, 0.1), 0.5), TailCheckFailed);
  CHECK_THROWS_AS(build_upper(make(g, 2.0, zero(), 1.0, 0.1), 0.0), std::invalid_argument);
}
