#pragma once

#include <cmath>
#include <stdexcept>

namespace plap {

/// Bisection on a sign-changing bracket until the midpoint is no longer
/// representable between the endpoints.
template <class F>
double bisect(const F& f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) throw std::invalid_argument("bisect: no sign change");
  const bool rising = f_lo < 0.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == rising) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

/// Root in (0, inf) of f with f(0) < 0 and f(x) > 0 for large x, found by
/// doubling an upper bracket from 1 and bisecting.
template <class F>
double positive_root(const F& f) {
  const double f0 = f(0.0);
  if (!(f0 < 0.0)) throw std::invalid_argument("positive_root: f(0) must be negative");
  double lo = 0.0, hi = 1.0;
  double f_lo = f0, f_hi = f(hi);
  while (!(f_hi > 0.0)) {
    if (f_hi == 0.0) return hi;
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("positive_root: no sign change");
    f_hi = f(hi);
  }
  return bisect(f, lo, hi, f_lo, f_hi);
}

}  // namespace plap
