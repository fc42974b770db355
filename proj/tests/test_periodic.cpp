#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "plap/error.hpp"
#include "plap/periodic.hpp"

using namespace plap;
using std::numbers::pi;

TEST_CASE("grid nodes are uniform and closed") {
  const Grid g(2.0, 16);
  CHECK(g.size() == 17);
  CHECK(g.step() == 0.125);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(16) == 2.0);
  CHECK_THROWS_AS(Grid(1.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 32), std::invalid_argument);
}

TEST_CASE("samples enforce periodic closure on both channels") {
  const Grid g(1.0, 16);
  CHECK_THROWS_AS(PeriodicSample::from_function(g, [](double t) { return t; }), ClosureError);
  CHECK_THROWS_AS(PeriodicSample::from_function(g, [](double t) { return std::sin(2 * pi * t); },
                                                [](double t) { return t; }),
                  ClosureError);
  CHECK_NOTHROW(PeriodicSample::from_function(g, [](double t) { return std::cos(2 * pi * t); }));
}

TEST_CASE("exponent field invariants") {
  const Grid g(1.0, 64);
  const auto pf = ExponentField::from_function(g, [](double t) { return 3 + std::sin(2 * pi * t); });
  CHECK(pf.p_minus() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pf.p_plus() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(ExponentField::constant(g, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ExponentField::from_function(g, [](double t) { return 2 + t; }), std::invalid_argument);
  const auto steep = ExponentField::from_function(Grid(1.0, 16), [](double t) { return 3 + 1.5 * std::sin(2 * pi * t); });
  CHECK_FALSE(steep.warnings().empty());
}

TEST_CASE("decompose splits off the trapezoid mean") {
  for (std::size_t n : {16u, 17u, 100u}) {
    const Grid g(1.0, n);
    const auto s = decompose(PeriodicSample::from_function(g, [](double t) { return std::sin(2 * pi * t); }));
    CHECK(std::abs(s.mean) <= 1e-12);
  }
  const Grid g(1.0, 32);
  const auto c = decompose(PeriodicSample::constant(g, 5.0));
  CHECK(c.mean == 5.0);
  CHECK(sup_norm(c.tilde.values()) == 0.0);
  const auto v = decompose(PeriodicSample::from_function(g, [](double t) { return 1 + std::cos(2 * pi * t); }));
  CHECK(v.mean == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tilde part integrates to zero for assorted functions") {
  const Grid g(3.0, 96);
  auto fns = {+[](double t) { return std::exp(std::sin(2 * pi * t / 3)); },
              +[](double t) { return 10 + std::cos(4 * pi * t / 3) * std::sin(2 * pi * t / 3); },
              +[](double t) { return std::abs(std::sin(pi * t / 3)); }};
  for (auto f : fns) {
    const auto v = PeriodicSample::from_function(g, f);
    const auto d = decompose(v);
    CHECK(std::abs(integrate(d.tilde)) <= 1e-12 * 3.0 * sup_norm(v.values()));
  }
}

TEST_CASE("trapezoid integral and running integral") {
  const Grid g(1.0, 37);
  std::vector<double> lin(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) lin[i] = g.node(i);
  CHECK(integrate(g, lin) == doctest::Approx(0.5).epsilon(1e-15));
  const auto c = cumint(g, lin);
  CHECK(c[0] == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(c[i] == doctest::Approx(0.5 * g.node(i) * g.node(i)).epsilon(1e-14));

  const auto z = cumint(PeriodicSample::constant(g, 0.0));
  CHECK(sup_norm(z.values()) == 0.0);
  CHECK_THROWS_AS(cumint(PeriodicSample::constant(g, 1.0)), ClosureError);
}

TEST_CASE("running integral of cos converges at second order") {
  double prev = 0.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    const Grid g(2 * pi, n);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::cos(g.node(i));
    const auto c = cumint(g, v);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(c[i] - std::sin(g.node(i))));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("norms") {
  const Grid g(1.0, 256);
  const auto two = norms(PeriodicSample::constant(g, 2.0), 2.0, 2.0);
  CHECK(two.sup == 2.0);
  CHECK(two.l1 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(two.lr == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(two.w1p.has_value());
  CHECK(*two.w1p == doctest::Approx(2.0).epsilon(1e-15));
  const auto s = PeriodicSample::from_function(g, [](double t) { return std::sin(2 * pi * t); });
  CHECK(std::abs(l1_norm(g, s.values()) - 2 / pi) <= 1e-3);
  const auto zero = norms(PeriodicSample::constant(g, 0.0), 3.0, 2.0);
  CHECK(zero.sup == 0.0);
  CHECK(zero.l1 == 0.0);
  CHECK(zero.lr == 0.0);
  CHECK(*zero.w1p == 0.0);
}

TEST_CASE("sobolev margin") {
  const Grid g(1.0, 512);
  const auto s = PeriodicSample::from_function(g, [](double t) { return std::sin(2 * pi * t); },
                                               [](double t) { return 2 * pi * std::cos(2 * pi * t); });
  CHECK(sobolev_margin(s) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(sobolev_margin(PeriodicSample::constant(g, 4.0)) == 0.0);
  // t(1 - t) repeated with period 1; the derivative kink at 0 is sampled as 0.
  std::vector<double> u(g.size()), du(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i);
    u[i] = t * (1 - t);
    du[i] = 1 - 2 * t;
  }
  du.front() = du.back() = 0.0;
  CHECK(sobolev_margin(PeriodicSample(g, u, du)) >= 0.0);
  const auto bad = PeriodicSample::from_function(g, [](double t) { return std::sin(2 * pi * t); },
                                                 [](double t) { return 5 * std::cos(2 * pi * t); });
  CHECK_THROWS_AS(sobolev_margin(bad), InconsistentChannels);
}

TEST_CASE("sobolev margin is nonnegative on random smooth samples") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Grid g(1.0, 256);
  for (int k = 0; k < 100; ++k) {
    double a[4], b[4];
    for (int j = 0; j < 4; ++j) a[j] = coef(rng), b[j] = coef(rng);
    auto v = [&](double t) {
      double s = 0.0;
      for (int j = 0; j < 4; ++j) s += a[j] * std::cos(2 * pi * (j + 1) * t) + b[j] * std::sin(2 * pi * (j + 1) * t);
      return s;
    };
    auto dv = [&](double t) {
      double s = 0.0;
      for (int j = 0; j < 4; ++j)
        s += 2 * pi * (j + 1) * (-a[j] * std::sin(2 * pi * (j + 1) * t) + b[j] * std::cos(2 * pi * (j + 1) * t));
      return s;
    };
    CHECK(sobolev_margin(PeriodicSample::from_function(g, v, dv)) >= -1e-8);
  }
}

TEST_CASE("phi and phi_inv examples") {
  CHECK(phi(3.0, 2.0) == 4.0);
  CHECK(phi_inv(3.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  for (double x : {-3.5, 0.0, 1e-8, 7.0}) CHECK(phi(2.0, x) == x);
  CHECK(phi(1.5, -4.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(phi_inv(1.5, -2.0) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(phi(1.3, 0.0) == 0.0);
  CHECK(phi_inv(4.0, 0.0) == 0.0);
}

TEST_CASE("phi properties on random inputs") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ps(1.2, 5.0), xs(-1e3, 1e3);
  for (int k = 0; k < 10000; ++k) {
    const double p = ps(rng), x = xs(rng);
    CHECK(std::abs(phi_inv(p, phi(p, x)) - x) <= 1e-10 * std::max(1.0, std::abs(x)));
    CHECK(phi(p, -x) == -phi(p, x));
  }
  for (int k = 0; k < 20; ++k) {
    const double p = ps(rng);
    std::vector<double> x(200);
    for (double& v : x) v = xs(rng);
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    for (std::size_t i = 1; i < x.size(); ++i) {
      CHECK(phi(p, x[i]) > phi(p, x[i - 1]));
      CHECK(phi_inv(p, x[i]) > phi_inv(p, x[i - 1]));
    }
  }
}
