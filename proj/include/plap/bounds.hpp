#pragma once

// A priori constants: R1..R4 and R for the eps-family
//   (phi_{p(t)}(u'))' + theta(u) u' - eps u = e(t),
// the uniform bound K for its eps = 0 variant, and M1, M2, c3 for the
// truncated problem of the lower/upper solution method.

#include <functional>
#include <span>

namespace plap {

using ScalarFn = std::function<double(double)>;

struct AprioriConstants {
  double R1, R2, R3, R4, R;
  double eps_star;
  // inputs
  double T, p_minus, tilde_e_l1, e_l1, theta_sup;
};

struct UniformBoundK {
  double K;
  double T, p_minus, e_l1;
};

struct BracketBounds {
  double M1, M2, c3;
  double T, p_minus, p_plus;
  double band_lo, band_hi;  // [min alpha, max beta]
  double h_sup, g_sup, f_sup;
};

/// Positive root of x^{p_-} - |e~|_{L1} T^{(p_- - 1)/p_-} x - T.
double compute_R1(double T, double p_minus, double tilde_e_l1);

/// max |fn| on [lo, hi]: 10^4-point grid, then a parabola through the best
/// sample and its neighbours.
double max_abs_on(const ScalarFn& fn, double lo, double hi, int points = 10000);

/// R2 = T^{(p_- - 1)/p_-} R1,
/// R3 = max{|e|_{L1} + R2 max_{|v| <= R2}|theta(v)| + eps* R2 T, 1},
/// R4 = R3^{1/(p_- - 1)}, R = R2 + R4 + 1.
AprioriConstants compute_chain(double R1, double T, double p_minus, double tilde_e_l1,
                               double e_l1, const ScalarFn& theta, double eps_star);

/// Positive root of x^{p_-} = T^{p_- - 1} (T + |e|_{L1} x). Takes no theta
/// and no shift c: the bound does not depend on them.
UniformBoundK compute_K(double T, double p_minus, double e_l1);

/// Smallest M1 on the ladder |beta|_inf + 2^k (refined by bisection after
/// the first rung) with, at every node and margin 1e-9,
///   h - g(beta) + M1 - beta > 0   and   h - g(alpha) - M1 - alpha < 0.
double compute_M1(std::span<const double> alpha, std::span<const double> beta,
                  std::span<const double> h, const ScalarFn& g);

/// c3 = max(|h|_inf + max|g| + 2 M1, max|f|) over the band [min alpha, max beta];
/// M2 = smallest value > 1 on a doubling ladder (refined by bisection) with
///   (M2^{p_- - 1} - (2 M1 / T + 1)^{p^+ - 1}) / c3 > T + 2 M1.
BracketBounds compute_c3_M2(double M1, const ScalarFn& f, const ScalarFn& g,
                            std::span<const double> alpha, std::span<const double> beta,
                            std::span<const double> h, double T, double p_minus, double p_plus);

// Substitution checks; every constructor above runs them before returning.
bool satisfies_R1(double R1, double T, double p_minus, double tilde_e_l1);
bool satisfies(const AprioriConstants& c);
bool satisfies(const UniformBoundK& k);
bool satisfies_M1(double M1, std::span<const double> alpha, std::span<const double> beta,
                  std::span<const double> h, const ScalarFn& g);
bool satisfies_M2(const BracketBounds& b);

}  // namespace plap
