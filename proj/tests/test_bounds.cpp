#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "plap/bounds.hpp"

using namespace plap;
using std::numbers::pi;

// Reference values below come from closed forms evaluated independently:
//   x^2 - b x - 1 = 0  ->  x = (b + sqrt(b^2 + 4)) / 2
//   x^3 - x - 1 = 0    ->  the plastic number.

TEST_CASE("R1 examples") {
  CHECK(std::abs(compute_R1(1.0, 2.0, 1.0) - (1 + std::sqrt(5.0)) / 2) <= 1e-12);
  CHECK(compute_R1(2.0, 3.0, 0.0) == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK(compute_R1(1.0, 2.0, 2 / pi) == doctest::Approx(1.36774839493136744).epsilon(1e-12));
  CHECK(compute_R1(1.0, 2.0, 2 / pi) == doctest::Approx(1.36773).epsilon(1e-5));
}

TEST_CASE("chain example with theta = 0") {
  const double R1 = compute_R1(1.0, 2.0, 2 / pi);
  const auto c = compute_chain(R1, 1.0, 2.0, 2 / pi, 2 / pi, [](double) { return 0.0; }, 1.0);
  CHECK(c.R2 == doctest::Approx(R1).epsilon(1e-15));
  CHECK(c.R3 == doctest::Approx(2.00436816729894879).epsilon(1e-12));
  CHECK(c.R4 == c.R3);
  CHECK(c.R == doctest::Approx(4.37211656223031623).epsilon(1e-12));
  CHECK(c.R3 == doctest::Approx(2.00435).epsilon(1e-5));
  CHECK(c.R == doctest::Approx(4.37208).epsilon(1e-5));
  CHECK(satisfies(c));
}

TEST_CASE("chain clamps R3 at 1") {
  const double R1 = compute_R1(1.0, 2.0, 0.0);
  const auto c = compute_chain(R1, 1.0, 2.0, 0.0, 0.0, [](double) { return 0.0; }, 0.0);
  CHECK(c.R3 == 1.0);
  CHECK(c.R4 == 1.0);
  const auto d = compute_chain(R1, 1.0, 2.0, 0.0, 0.0, [](double) { return 0.0; }, 3.0);
  CHECK(d.R3 == doctest::Approx(3.0 * d.R2).epsilon(1e-15));
}

TEST_CASE("chain uses the sup of theta on [-R2, R2]") {
  const double R1 = compute_R1(1.0, 3.0, 0.5);
  const auto c = compute_chain(R1, 1.0, 3.0, 0.5, 0.5, [](double x) { return x * x; }, 0.0);
  CHECK(c.R3 == doctest::Approx(std::max(0.5 + c.R2 * c.R2 * c.R2, 1.0)).epsilon(1e-9));
  CHECK(c.R4 == doctest::Approx(std::sqrt(c.R3)).epsilon(1e-14));
  CHECK(satisfies(c));
}

TEST_CASE("K examples") {
  CHECK(compute_K(1.0, 2.0, 2 / pi).K == doctest::Approx(1.36774839493136744).epsilon(1e-12));
  CHECK(compute_K(2.5, 3.0, 0.0).K == doctest::Approx(2.5).epsilon(1e-12));
  const auto k = compute_K(1.0, 3.0, 1.0);
  CHECK(k.K == doctest::Approx(1.32471795724474603).epsilon(1e-12));
  CHECK(satisfies(k));
}

TEST_CASE("R1 and K are monotone on parameter ladders") {
  double prev = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double r = compute_R1(1.0, 2.5, 0.25 * k);
    CHECK(r >= prev);
    prev = r;
  }
  prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double r = compute_R1(0.25 * k, 2.5, 1.0);
    CHECK(r >= prev);
    prev = r;
  }
  prev = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double K = compute_K(1.0, 1.7, 0.5 * k).K;
    CHECK(K >= prev);
    prev = K;
  }
}

TEST_CASE("max_abs_on finds interior maxima") {
  CHECK(max_abs_on([](double x) { return std::sin(x); }, 0.0, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs_on([](double x) { return x * x - 4; }, -1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(max_abs_on([](double x) { return 3 * x; }, -2.0, 1.0) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("M1 examples") {
  const std::vector<double> a(33, 1.0), b(33, 2.0), h(33, 1.0);
  const auto g = [](double x) { return 1.0 / x; };
  const double M1 = compute_M1(a, b, h, g);
  CHECK(M1 == 3.0);
  CHECK(M1 > 2.0);
  CHECK(satisfies_M1(M1, a, b, h, g));

  std::vector<double> h10(h);
  for (double& x : h10) x += 10.0;
  const double M1b = compute_M1(a, b, h10, g);
  CHECK(M1b > M1);
  CHECK(satisfies_M1(M1b, a, b, h10, g));
}

TEST_CASE("c3 example") {
  const std::vector<double> a(33, 1.0), b(33, 2.0), h(33, 1.0);
  const auto bb = compute_c3_M2(3.0, [](double) { return 0.0; }, [](double x) { return 1.0 / x; }, a, b, h, 1.0,
                                2.0, 2.0);
  CHECK(bb.c3 == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(satisfies_M2(bb));
}

TEST_CASE("M2 for p = 2 sits just above the linear closed form") {
  const std::vector<double> a(33, 0.5), b(33, 3.0), h(33, 1.5);
  const double T = 1.5;
  const auto g = [](double x) { return 1.0 / x; };
  const double M1 = compute_M1(a, b, h, g);
  const auto bb = compute_c3_M2(M1, [](double x) { return std::sin(x); }, g, a, b, h, T, 2.0, 2.0);
  const double closed = bb.c3 * (T + 2 * M1) + 2 * M1 / T + 1;
  CHECK(bb.M2 > closed);
  CHECK(bb.M2 <= 2 * closed);
  CHECK(bb.M2 - closed <= 1e-6 * closed);
  CHECK(satisfies_M2(bb));
}

TEST_CASE("bound constants re-satisfy their definitions on a sweep") {
  for (double pm : {1.3, 2.0, 3.7}) {
    for (double e : {0.0, 0.4, 5.0}) {
      for (double T : {0.5, 1.0, 2.0 * pi}) {
        const double R1 = compute_R1(T, pm, e);
        CHECK(satisfies_R1(R1, T, pm, e));
        CHECK(satisfies(compute_chain(R1, T, pm, e, e, [](double x) { return 1 + x; }, 0.3)));
        CHECK(satisfies(compute_K(T, pm, e)));
      }
    }
  }
}
