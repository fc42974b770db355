#pragma once

// Flat `key = value` problem files.
//
//   # comment
//   T = 1
//   N = 512
//   p = "3 + sin(2*pi*t)"        expressions are quoted; p and h use t,
//   f = "x"                      f and g use x
//   g = "sigma/x^mu"
//   h = "1 + 0.1*cos(2*pi*t)"
//   param.sigma = 1              named constants usable in every expression
//   param.mu = 2
//   delta = 1.01                 tail threshold for the upper solution
//   tail_asserted = true         user asserts limsup g < mean(h) beyond delta
//   positivity_asserted = true   user asserts g > 0 on (0, inf)
//   positivity_x_max = 1000
//   alpha_min = 1e-6             log-spaced search grid for the constant
//   alpha_max = 1000             lower solution
//   alpha_n = 2000
//   solve_tol = 1e-8
//   cert_tol = 1e-6
//   mode = solve                 solve | corollary_sweep | bounds_only | verify
//   sweep.hbar = -1, -0.1, 0, 0.1, 0.5, 1, 2
//   sweep.profile = "0.1*cos(2*pi*t)"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plap/expr.hpp"
#include "plap/periodic.hpp"

namespace plap {

enum class Mode { solve, corollary_sweep, bounds_only, verify };

std::string_view to_string(Mode m);

struct AlphaSearch {
  double x_min = 1e-6;
  double x_max = 1e3;
  int n = 2000;
};

struct ProblemConfig {
  double T = 0.0;
  std::size_t N = 0;
  std::string p_src, f_src, g_src, h_src;
  expr::UnaryFunction p, f, g, h;
  expr::Bindings params;
  std::optional<double> delta;
  bool tail_asserted = false;
  bool positivity_asserted = false;
  double positivity_x_max = 1e3;
  AlphaSearch alpha_search;
  double solve_tol = 1e-8;
  double cert_tol = 1e-6;
  Mode mode = Mode::solve;
  std::vector<double> sweep_hbar;
  std::string sweep_profile_src = "0";
  expr::UnaryFunction sweep_profile;

  Grid grid() const { return Grid(T, N); }
  ExponentField exponent_field() const;
  PeriodicSample h_sample() const;

  /// Effective values, one `key = value` line each, in a fixed order.
  std::vector<std::string> echo() const;
};

/// Throws ConfigError (with key and line where known).
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::filesystem::path& path);

/// Re-checks the cross-field invariants (used after command-line overrides).
void validate_config(const ProblemConfig& cfg);

/// Copy of cfg with h = hbar + profile(t).
ProblemConfig with_mean_forcing(const ProblemConfig& cfg, double hbar);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

}  // namespace plap
