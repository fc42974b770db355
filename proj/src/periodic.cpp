#include "plap/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plap/error.hpp"

namespace plap {

Grid::Grid(double period, std::size_t intervals) : period_(period), intervals_(intervals) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("grid period must be positive and finite");
  if (intervals < min_intervals)
    throw std::invalid_argument("grid needs at least 16 intervals");
}

double closure_tolerance(std::span<const double> v) { return 1e-9 * (1.0 + sup_norm(v)); }

namespace {

void check_closure(std::span<const double> v, const char* channel) {
  const double gap = std::abs(v.front() - v.back());
  if (!(gap <= closure_tolerance(v)))
    throw ClosureError(std::string(channel) + " channel is not periodic: |v(0) - v(T)| = " +
                       std::to_string(gap));
}

}  // namespace

PeriodicSample::PeriodicSample(Grid grid, std::vector<double> values,
                               std::optional<std::vector<double>> derivative)
    : grid_(grid), values_(std::move(values)), derivative_(std::move(derivative)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("value channel size mismatch");
  check_closure(values_, "value");
  if (derivative_) {
    if (derivative_->size() != grid_.size())
      throw std::invalid_argument("derivative channel size mismatch");
    check_closure(*derivative_, "derivative");
  }
}

PeriodicSample PeriodicSample::from_function(const Grid& grid,
                                             const std::function<double(double)>& value,
                                             const std::function<double(double)>& derivative) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(grid.node(i));
  std::optional<std::vector<double>> d;
  if (derivative) {
    d.emplace(grid.size());
    for (std::size_t i = 0; i < d->size(); ++i) (*d)[i] = derivative(grid.node(i));
  }
  return PeriodicSample(grid, std::move(v), std::move(d));
}

PeriodicSample PeriodicSample::constant(const Grid& grid, double c) {
  return PeriodicSample(grid, std::vector<double>(grid.size(), c),
                        std::vector<double>(grid.size(), 0.0));
}

std::span<const double> PeriodicSample::derivative() const {
  if (!derivative_) throw std::logic_error("sample has no derivative channel");
  return *derivative_;
}

ExponentField::ExponentField(Grid grid, std::vector<double> p) : grid_(grid), p_(std::move(p)) {
  if (p_.size() != grid_.size()) throw std::invalid_argument("exponent field size mismatch");
  for (double x : p_)
    if (!std::isfinite(x)) throw std::invalid_argument("exponent field is not finite");
  auto [lo, hi] = std::minmax_element(p_.begin(), p_.end());
  p_minus_ = *lo;
  p_plus_ = *hi;
  if (!(p_minus_ > 1.0))
    throw std::invalid_argument("exponent field needs p_- > 1 (got " + std::to_string(p_minus_) +
                                ")");
  if (std::abs(p_.front() - p_.back()) > 1e-12)
    throw std::invalid_argument("exponent field needs p(0) = p(T)");
  for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
    if (std::abs(p_[i + 1] - p_[i]) > 0.1 * p_[i]) {
      warnings_.push_back("p varies by more than 10% between nodes " + std::to_string(i) +
                          " and " + std::to_string(i + 1) + "; refine the grid");
      break;
    }
  }
}

ExponentField ExponentField::from_function(const Grid& grid,
                                           const std::function<double(double)>& p) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p(grid.node(i));
  return ExponentField(grid, std::move(v));
}

ExponentField ExponentField::constant(const Grid& grid, double p) {
  return ExponentField(grid, std::vector<double>(grid.size(), p));
}

double phi(double p, double x) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), p - 1.0), x);
}

double phi_inv(double p, double y) {
  if (y == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(y), 1.0 / (p - 1.0)), y);
}

double phi_slope(double p, double x, double reg) {
  if (p == 2.0) return 1.0;
  return (p - 1.0) * std::pow(x * x + reg * reg, 0.5 * (p - 2.0));
}

double integrate(const Grid& grid, std::span<const double> v) {
  if (v.size() != grid.size()) throw std::invalid_argument("sample size does not match grid");
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * grid.step();
}

double integrate(const PeriodicSample& v) { return integrate(v.grid(), v.values()); }

std::vector<double> cumint(const Grid& grid, std::span<const double> v) {
  if (v.size() != grid.size()) throw std::invalid_argument("sample size does not match grid");
  std::vector<double> out(v.size());
  const double half = 0.5 * grid.step();
  out[0] = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) out[i] = out[i - 1] + half * (v[i - 1] + v[i]);
  return out;
}

PeriodicSample cumint(const PeriodicSample& v) {
  return PeriodicSample(v.grid(), cumint(v.grid(), v.values()));
}

double mean(const Grid& grid, std::span<const double> v) {
  return integrate(grid, v) / grid.period();
}

Decomposition decompose(const PeriodicSample& v) {
  const double m = mean(v.grid(), v.values());
  std::vector<double> tilde(v.values().begin(), v.values().end());
  for (double& x : tilde) x -= m;
  std::optional<std::vector<double>> d;
  if (v.has_derivative()) d.emplace(v.derivative().begin(), v.derivative().end());
  return {m, PeriodicSample(v.grid(), std::move(tilde), std::move(d))};
}

double sup_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double l1_norm(const Grid& grid, std::span<const double> v) {
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  return integrate(grid, a);
}

double lr_norm(const Grid& grid, std::span<const double> v, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("L^r norm needs r >= 1");
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [r](double x) { return std::pow(std::abs(x), r); });
  return std::pow(integrate(grid, a), 1.0 / r);
}

Norms norms(const PeriodicSample& v, double r, double p_minus) {
  Norms n{sup_norm(v.values()), l1_norm(v.grid(), v.values()), lr_norm(v.grid(), v.values(), r),
          std::nullopt};
  if (v.has_derivative()) {
    const double a = std::pow(lr_norm(v.grid(), v.values(), p_minus), p_minus);
    const double b = std::pow(lr_norm(v.grid(), v.derivative(), p_minus), p_minus);
    n.w1p = std::pow(a + b, 1.0 / p_minus);
  }
  return n;
}

void check_channel_consistency(const PeriodicSample& v) {
  if (!v.has_derivative()) throw InconsistentChannels("sample has no derivative channel");
  const auto u = v.values();
  const auto running = cumint(v.grid(), v.derivative());
  double worst = 0.0;
  double spread = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max(worst, std::abs(u[i] - u[0] - running[i]));
    spread = std::max(spread, std::abs(u[i] - u[0]));
  }
  const double scale = spread + v.grid().period() * sup_norm(v.derivative());
  if (worst > 0.02 * scale + 1e-12)
    throw InconsistentChannels("derivative channel does not integrate to the value channel (defect " +
                               std::to_string(worst) + ")");
}

double sobolev_margin(const PeriodicSample& v) {
  check_channel_consistency(v);
  const auto parts = decompose(v);
  return l1_norm(v.grid(), v.derivative()) - sup_norm(parts.tilde.values());
}

}  // namespace plap
