#include "plap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plap/roots.hpp"

namespace plap {

namespace {

constexpr double kMargin = 1e-9;
constexpr double kRootTol = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void self_check(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("self-check failed: ") + what);
}

double r1_defect(double x, double T, double p_minus, double b) {
  return std::pow(x, p_minus) - b * std::pow(T, (p_minus - 1.0) / p_minus) * x - T;
}

double k_defect(double x, double T, double p_minus, double e_l1) {
  return std::pow(x, p_minus) - std::pow(T, p_minus - 1.0) * (T + e_l1 * x);
}

double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }
double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

double m2_lhs(double M2, double M1, double c3, double T, double p_minus, double p_plus) {
  return (std::pow(M2, p_minus - 1.0) - std::pow(2.0 * M1 / T + 1.0, p_plus - 1.0)) / c3;
}

bool m2_ok(double M2, double M1, double c3, double T, double p_minus, double p_plus) {
  return M2 > 1.0 && m2_lhs(M2, M1, c3, T, p_minus, p_plus) - (T + 2.0 * M1) >= kMargin;
}

}  // namespace

bool satisfies_R1(double R1, double T, double p_minus, double tilde_e_l1) {
  const double b = tilde_e_l1 * std::pow(T, (p_minus - 1.0) / p_minus);
  const double scale = std::pow(R1, p_minus) + b * R1 + T;
  return R1 > 0.0 && std::abs(r1_defect(R1, T, p_minus, tilde_e_l1)) <= kRootTol * scale;
}

double compute_R1(double T, double p_minus, double tilde_e_l1) {
  require(T > 0.0 && std::isfinite(T), "compute_R1: T must be positive");
  require(p_minus > 1.0, "compute_R1: p_minus must exceed 1");
  require(tilde_e_l1 >= 0.0 && std::isfinite(tilde_e_l1), "compute_R1: norm must be >= 0");
  const double r = positive_root([&](double x) { return r1_defect(x, T, p_minus, tilde_e_l1); });
  self_check(satisfies_R1(r, T, p_minus, tilde_e_l1), "R1");
  return r;
}

double max_abs_on(const ScalarFn& fn, double lo, double hi, int points) {
  require(lo <= hi, "max_abs_on: empty interval");
  if (lo == hi) return std::abs(fn(lo));
  const int n = std::max(points, 3);
  const double h = (hi - lo) / (n - 1);
  std::vector<double> v(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    v[i] = std::abs(fn(lo + h * i));
    if (v[i] > v[best]) best = i;
  }
  double m = v[best];
  if (best > 0 && best < n - 1) {
    const double a = v[best - 1], b = v[best], c = v[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) {
      const double shift = 0.5 * (a - c) / denom;
      if (std::abs(shift) <= 1.0) m = std::max(m, std::abs(fn(lo + h * (best + shift))));
    }
  }
  return m;
}

bool satisfies(const AprioriConstants& c) {
  const double r2 = std::pow(c.T, (c.p_minus - 1.0) / c.p_minus) * c.R1;
  const double r3 = std::max(c.e_l1 + c.R2 * c.theta_sup + c.eps_star * c.R2 * c.T, 1.0);
  const double r4 = std::pow(c.R3, 1.0 / (c.p_minus - 1.0));
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(b)); };
  return satisfies_R1(c.R1, c.T, c.p_minus, c.tilde_e_l1) && close(c.R2, r2) && close(c.R3, r3) &&
         close(c.R4, r4) && close(c.R, c.R2 + c.R4 + 1.0);
}

AprioriConstants compute_chain(double R1, double T, double p_minus, double tilde_e_l1,
                               double e_l1, const ScalarFn& theta, double eps_star) {
  require(R1 > 0.0 && T > 0.0 && p_minus > 1.0, "compute_chain: invalid inputs");
  require(e_l1 >= 0.0 && eps_star >= 0.0, "compute_chain: invalid inputs");
  AprioriConstants c{};
  c.T = T;
  c.p_minus = p_minus;
  c.tilde_e_l1 = tilde_e_l1;
  c.e_l1 = e_l1;
  c.eps_star = eps_star;
  c.R1 = R1;
  c.R2 = std::pow(T, (p_minus - 1.0) / p_minus) * R1;
  c.theta_sup = max_abs_on(theta, -c.R2, c.R2);
  c.R3 = std::max(e_l1 + c.R2 * c.theta_sup + eps_star * c.R2 * T, 1.0);
  c.R4 = std::pow(c.R3, 1.0 / (p_minus - 1.0));
  c.R = c.R2 + c.R4 + 1.0;
  self_check(satisfies(c), "R chain");
  return c;
}

bool satisfies(const UniformBoundK& k) {
  const double scale = std::pow(k.K, k.p_minus) + std::pow(k.T, k.p_minus - 1.0) * (k.T + k.e_l1 * k.K);
  return k.K > 0.0 && std::abs(k_defect(k.K, k.T, k.p_minus, k.e_l1)) <= kRootTol * scale;
}

UniformBoundK compute_K(double T, double p_minus, double e_l1) {
  require(T > 0.0 && std::isfinite(T), "compute_K: T must be positive");
  require(p_minus > 1.0, "compute_K: p_minus must exceed 1");
  require(e_l1 >= 0.0 && std::isfinite(e_l1), "compute_K: norm must be >= 0");
  UniformBoundK k{positive_root([&](double x) { return k_defect(x, T, p_minus, e_l1); }), T,
                  p_minus, e_l1};
  self_check(satisfies(k), "K");
  return k;
}

bool satisfies_M1(double M1, std::span<const double> alpha, std::span<const double> beta,
                  std::span<const double> h, const ScalarFn& g) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] - g(beta[i]) + M1 - beta[i] >= kMargin)) return false;
    if (!(h[i] - g(alpha[i]) - M1 - alpha[i] <= -kMargin)) return false;
  }
  return M1 > max_of(beta) && M1 > -min_of(beta);
}

double compute_M1(std::span<const double> alpha, std::span<const double> beta,
                  std::span<const double> h, const ScalarFn& g) {
  require(alpha.size() == beta.size() && beta.size() == h.size() && !h.empty(),
          "compute_M1: sample sizes differ");
  double beta_sup = 0.0;
  for (double b : beta) beta_sup = std::max(beta_sup, std::abs(b));
  auto ok = [&](double m) { return satisfies_M1(m, alpha, beta, h, g); };

  double prev = beta_sup;
  double rung = beta_sup + 1.0;
  for (int k = 0; !ok(rung); ++k) {
    if (k > 1100) throw std::runtime_error("compute_M1: ladder did not terminate");
    prev = rung;
    rung = beta_sup + std::ldexp(1.0, k + 1);
  }
  if (prev == beta_sup) return rung;
  // prev fails, rung passes.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (prev + rung);
    if (mid <= prev || mid >= rung) break;
    (ok(mid) ? rung : prev) = mid;
  }
  self_check(ok(rung), "M1");
  return rung;
}

bool satisfies_M2(const BracketBounds& b) {
  return b.M1 > 0.0 && b.c3 > 0.0 && m2_ok(b.M2, b.M1, b.c3, b.T, b.p_minus, b.p_plus);
}

BracketBounds compute_c3_M2(double M1, const ScalarFn& f, const ScalarFn& g,
                            std::span<const double> alpha, std::span<const double> beta,
                            std::span<const double> h, double T, double p_minus, double p_plus) {
  require(M1 > 0.0 && T > 0.0 && p_minus > 1.0 && p_plus >= p_minus,
          "compute_c3_M2: invalid inputs");
  require(!alpha.empty() && !beta.empty() && !h.empty(), "compute_c3_M2: empty samples");
  BracketBounds b{};
  b.M1 = M1;
  b.T = T;
  b.p_minus = p_minus;
  b.p_plus = p_plus;
  b.band_lo = min_of(alpha);
  b.band_hi = max_of(beta);
  require(b.band_lo <= b.band_hi, "compute_c3_M2: alpha exceeds beta");
  b.h_sup = 0.0;
  for (double x : h) b.h_sup = std::max(b.h_sup, std::abs(x));
  b.g_sup = max_abs_on(g, b.band_lo, b.band_hi);
  b.f_sup = max_abs_on(f, b.band_lo, b.band_hi);
  // The nodal values themselves are also in the band.
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    b.g_sup = std::max({b.g_sup, std::abs(g(alpha[i])), std::abs(g(beta[i]))});
    b.f_sup = std::max({b.f_sup, std::abs(f(alpha[i])), std::abs(f(beta[i]))});
  }
  b.c3 = std::max(b.h_sup + b.g_sup + 2.0 * M1, b.f_sup);

  auto ok = [&](double m) { return m2_ok(m, M1, b.c3, T, p_minus, p_plus); };
  double prev = 1.0;
  double rung = 2.0;
  while (!ok(rung)) {
    prev = rung;
    rung *= 2.0;
    if (!std::isfinite(rung)) throw std::runtime_error("compute_c3_M2: ladder did not terminate");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (prev + rung);
    if (mid <= prev || mid >= rung) break;
    (ok(mid) ? rung : prev) = mid;
  }
  b.M2 = rung;
  self_check(satisfies_M2(b), "M2");
  return b;
}

}  // namespace plap
