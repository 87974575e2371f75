#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrp {

class Rng;

// Open interval (lower, upper) of admissible marks.
struct StateSpace {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const noexcept { return lower < x && x < upper; }
};

using RateFunction = std::function<double(double mark, double time)>;
using TransitionSampler = std::function<double(double mark, Rng& rng)>;
using CensorFunction = std::function<double(double mark)>;

/// A non-homogeneous marked renewal process given by its jump rate, its
/// transition kernel (represented only through a sampler) and its
/// deterministic censorship time. Immutable after construction; share freely.
///
/// `cumulative` and `inverse_cumulative` are optional closed forms. When
/// `cumulative` is empty the cumulative rate is obtained by quadrature; when
/// `inverse_cumulative` is empty the sojourn sampler falls back to bisection.
struct ProcessSpec {
  std::string name;
  StateSpace state_space;
  RateFunction jump_rate;
  TransitionSampler kernel_sampler;
  CensorFunction censorship;
  RateFunction cumulative;
  // (mark, level) -> time s with cumulative(mark, s) == level.
  RateFunction inverse_cumulative;
};

/// Cumulative rate int_0^t jump_rate(z, s) ds, closed form when available.
double cumulative_rate(const ProcessSpec& spec, double z, double t);

/// Always integrates jump_rate numerically (adaptive Simpson, abs. tol 1e-10),
/// ignoring any closed form. Used to cross-check `cumulative`.
double quadrature_cumulative_rate(const ProcessSpec& spec, double z, double t);

/// Uncensored survival exp(-cumulative_rate(z, t)).
double survival(const ProcessSpec& spec, double z, double t);

/// Conditional sojourn density jump_rate(z, t) * survival(z, t).
double density(const ProcessSpec& spec, double z, double t);

/// Adaptive Simpson quadrature of f on [a, b]. Throws NumericError when the
/// recursion depth is exhausted before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 48);

/// Reliability model of a production machine: marks are temperatures on
/// (0, 60), jump rate 3 + 0.05 x, censorship 1, and after each failure the
/// new temperature is Normal(20, (0.5 + |x - 20|)^2) truncated to (0, 60).
ProcessSpec machine_model();

/// Constant jump rate `rate`, constant censorship `horizon`, machine-model
/// transition kernel.
ProcessSpec constant_rate_model(double rate, double horizon = 1.0);

/// The machine model's kernel: rejection sampling of Normal(20, sigma_x^2)
/// on (0, 60). Exposed so that other specs can reuse it.
double machine_transition(double mark, Rng& rng);

/// "machine" or "constant:<c>".
ProcessSpec model_by_name(std::string_view name);

struct Diagnostics {
  double lipschitz_estimate = 0.0;
  std::vector<double> time_grid;
  // Grid maximum over marks of jump_rate(., t) for each t in time_grid.
  std::vector<double> rate_bound_estimate;
  std::vector<std::string> warnings;
};

/// Grid-level sanity check of the characteristics. Never throws for bad
/// grids: problems are reported as warnings. `max_slope` is the per-unit-mark
/// rate variation above which adjacent marks trigger a warning.
Diagnostics validate_characteristics(const ProcessSpec& spec, std::span<const double> mark_grid,
                                     std::span<const double> time_grid, double max_slope = 1.0);

}  // namespace mrp
