#pragma once

// Periodic grids, trapezoid quadrature, norms and the p(t)-Laplacian maps.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plap {

/// Uniform closed grid t_i = i*T/N, i = 0..N, with t_N identified with t_0.
class Grid {
 public:
  static constexpr std::size_t min_intervals = 16;

  Grid(double period, std::size_t intervals);

  double period() const noexcept { return period_; }
  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_ + 1; }
  double step() const noexcept { return period_ / static_cast<double>(intervals_); }
  double node(std::size_t i) const noexcept {
    return period_ * static_cast<double>(i) / static_cast<double>(intervals_);
  }

  bool operator==(const Grid&) const = default;

 private:
  double period_;
  std::size_t intervals_;
};

/// 1e-9 * (1 + sup|v|).
double closure_tolerance(std::span<const double> v);

/// Grid-sampled T-periodic function with an optional derivative channel.
/// Construction enforces |v_0 - v_N| <= closure_tolerance(v) on each channel.
class PeriodicSample {
 public:
  PeriodicSample(Grid grid, std::vector<double> values,
                 std::optional<std::vector<double>> derivative = std::nullopt);

  static PeriodicSample from_function(const Grid& grid, const std::function<double(double)>& value,
                                      const std::function<double(double)>& derivative = nullptr);
  /// Constant sample with a zero derivative channel.
  static PeriodicSample constant(const Grid& grid, double c);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  bool has_derivative() const noexcept { return derivative_.has_value(); }
  /// Throws std::logic_error when the channel is absent.
  std::span<const double> derivative() const;

  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::optional<std::vector<double>> derivative_;
};

/// Sampled variable exponent p(t) with p_- > 1 and p(0) = p(T).
class ExponentField {
 public:
  ExponentField(Grid grid, std::vector<double> p);

  static ExponentField from_function(const Grid& grid, const std::function<double(double)>& p);
  static ExponentField constant(const Grid& grid, double p);

  const Grid& grid() const noexcept { return grid_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }
  double p_minus() const noexcept { return p_minus_; }
  double p_plus() const noexcept { return p_plus_; }
  /// p_{i+1/2} by linear interpolation of the node samples.
  double midpoint(std::size_t i) const { return 0.5 * (p_[i] + p_[i + 1]); }
  /// Set when p changes by more than 10% between adjacent nodes.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  Grid grid_;
  std::vector<double> p_;
  double p_minus_;
  double p_plus_;
  std::vector<std::string> warnings_;
};

// phi_p(x) = |x|^{p-2} x and its inverse |y|^{1/(p-1)-1} y; both odd, both 0 at 0.
double phi(double p, double x);
double phi_inv(double p, double y);
inline double phi(const ExponentField& pf, std::size_t i, double x) { return phi(pf[i], x); }
inline double phi_inv(const ExponentField& pf, std::size_t i, double y) { return phi_inv(pf[i], y); }

/// Regularised slope (p-1)(x^2 + reg^2)^{(p-2)/2} of phi_p, used by Newton Jacobians.
double phi_slope(double p, double x, double reg);

// --- quadrature ------------------------------------------------------------

/// Composite trapezoid rule over the closed grid.
double integrate(const Grid& grid, std::span<const double> v);
double integrate(const PeriodicSample& v);

/// Running trapezoid integral; result[0] = 0.
std::vector<double> cumint(const Grid& grid, std::span<const double> v);
/// Throws ClosureError when the running integral does not return to 0 (nonzero mean).
PeriodicSample cumint(const PeriodicSample& v);

/// (1/T) * trapezoid integral.
double mean(const Grid& grid, std::span<const double> v);

struct Decomposition {
  double mean;
  PeriodicSample tilde;
};

/// v = mean + tilde with tilde of zero trapezoid mean.
Decomposition decompose(const PeriodicSample& v);

// --- norms -----------------------------------------------------------------

double sup_norm(std::span<const double> v);
double l1_norm(const Grid& grid, std::span<const double> v);
double lr_norm(const Grid& grid, std::span<const double> v, double r);

struct Norms {
  double sup;
  double l1;
  double lr;
  std::optional<double> w1p;  // present when the derivative channel is
};

/// W^{1,p} norm uses exponent `p_minus`: (|v|_{L^p}^p + |v'|_{L^p}^p)^{1/p}.
Norms norms(const PeriodicSample& v, double r, double p_minus);

/// Throws InconsistentChannels unless the derivative channel integrates back
/// to the value channel within 2% of (sup|v - v_0| + T sup|v'|).
void check_channel_consistency(const PeriodicSample& v);

/// |v'|_{L^1} - |v~|_inf; nonnegative up to quadrature error for valid samples.
double sobolev_margin(const PeriodicSample& v);

}  // namespace plap
