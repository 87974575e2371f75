#include "mrp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mrp/errors.hpp"
#include "mrp/rng.hpp"

namespace mrp {

namespace {

void require_in_domain(const ProcessSpec& spec, double z, double t, const char* op) {
  if (!spec.state_space.contains(z)) {
    throw DomainError(fmt::format("{}: mark {} outside ({}, {})", op, z, spec.state_space.lower,
                                  spec.state_space.upper));
  }
  if (!(t >= 0.0)) {
    throw DomainError(fmt::format("{}: negative time {}", op, t));
  }
}

struct SimpsonState {
  const std::function<double(double)>& f;
  bool exhausted = false;
};

double simpson_step(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    st.exhausted = true;
    return left + right + delta / 15.0;
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  SimpsonState st{f};
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double value = simpson_step(st, a, b, fa, fm, fb, whole, abs_tol, max_depth);
  if (st.exhausted || !std::isfinite(value)) {
    throw NumericError(fmt::format("adaptive Simpson on [{}, {}] did not reach tolerance {}", a, b,
                                   abs_tol));
  }
  return value;
}

double quadrature_cumulative_rate(const ProcessSpec& spec, double z, double t) {
  require_in_domain(spec, z, t, "cumulative_rate");
  try {
    return adaptive_simpson([&](double s) { return spec.jump_rate(z, s); }, 0.0, t);
  } catch (const NumericError& e) {
    throw NumericError(fmt::format("cumulative rate at mark {}, time {}: {}", z, t, e.what()));
  }
}

double cumulative_rate(const ProcessSpec& spec, double z, double t) {
  if (spec.cumulative) {
    require_in_domain(spec, z, t, "cumulative_rate");
    return spec.cumulative(z, t);
  }
  return quadrature_cumulative_rate(spec, z, t);
}

double survival(const ProcessSpec& spec, double z, double t) {
  return std::exp(-cumulative_rate(spec, z, t));
}

double density(const ProcessSpec& spec, double z, double t) {
  return spec.jump_rate(z, t) * survival(spec, z, t);
}

double machine_transition(double mark, Rng& rng) {
  constexpr double kCenter = 20.0;
  constexpr double kLower = 0.0;
  constexpr double kUpper = 60.0;
  constexpr int kMaxTries = 1'000'000;
  const double sigma = 0.5 + std::abs(mark - kCenter);
  for (int i = 0; i < kMaxTries; ++i) {
    const double y = kCenter + sigma * rng.normal();
    if (kLower < y && y < kUpper) return y;
  }
  throw NumericError(fmt::format("truncated normal rejection budget exceeded at mark {}", mark));
}

ProcessSpec machine_model() {
  ProcessSpec spec;
  spec.name = "machine";
  spec.state_space = {0.0, 60.0};
  spec.jump_rate = [](double x, double) { return 3.0 + 0.05 * x; };
  spec.cumulative = [](double x, double t) { return (3.0 + 0.05 * x) * t; };
  spec.inverse_cumulative = [](double x, double level) { return level / (3.0 + 0.05 * x); };
  spec.censorship = [](double) { return 1.0; };
  spec.kernel_sampler = machine_transition;
  return spec;
}

ProcessSpec constant_rate_model(double rate, double horizon) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw DomainError(fmt::format("constant rate must be finite and >= 0, got {}", rate));
  }
  if (!(horizon > 0.0)) {
    throw DomainError(fmt::format("censorship horizon must be > 0, got {}", horizon));
  }
  ProcessSpec spec;
  spec.name = fmt::format("constant:{}", rate);
  spec.state_space = {0.0, 60.0};
  spec.jump_rate = [rate](double, double) { return rate; };
  spec.cumulative = [rate](double, double t) { return rate * t; };
  spec.inverse_cumulative = [rate](double, double level) {
    return rate > 0.0 ? level / rate : std::numeric_limits<double>::infinity();
  };
  spec.censorship = [horizon](double) { return horizon; };
  spec.kernel_sampler = machine_transition;
  return spec;
}

ProcessSpec model_by_name(std::string_view name) {
  if (name == "machine") return machine_model();
  constexpr std::string_view kConstant = "constant:";
  if (name.starts_with(kConstant)) {
    const std::string_view arg = name.substr(kConstant.size());
    double rate = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), rate);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
      throw DomainError(fmt::format("bad constant rate in model name '{}'", name));
    }
    return constant_rate_model(rate);
  }
  throw DomainError(fmt::format("unknown model '{}' (expected 'machine' or 'constant:<c>')", name));
}

Diagnostics validate_characteristics(const ProcessSpec& spec, std::span<const double> mark_grid,
                                     std::span<const double> time_grid, double max_slope) {
  Diagnostics diag;
  if (mark_grid.empty() || time_grid.empty()) {
    diag.warnings.emplace_back("empty mark or time grid; nothing checked");
    return diag;
  }

  std::vector<double> marks;
  for (double z : mark_grid) {
    if (spec.state_space.contains(z)) {
      marks.push_back(z);
    } else {
      diag.warnings.push_back(fmt::format("mark {} outside the state space, skipped", z));
    }
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  double min_censor = std::numeric_limits<double>::infinity();
  for (double z : marks) min_censor = std::min(min_censor, spec.censorship(z));
  for (double t : time_grid) {
    if (t < 0.0 || t >= min_censor) {
      diag.warnings.push_back(
          fmt::format("time {} outside [0, {}) (minimum censorship on the grid)", t, min_censor));
    }
  }

  for (double t : time_grid) {
    double bound = 0.0;
    for (double z : marks) {
      const double r = spec.jump_rate(z, t);
      if (!(r >= 0.0)) {
        diag.warnings.push_back(fmt::format("negative or NaN jump rate {} at ({}, {})", r, z, t));
      }
      bound = std::max(bound, r);
    }
    diag.time_grid.push_back(t);
    diag.rate_bound_estimate.push_back(bound);

    for (std::size_t i = 1; i < marks.size(); ++i) {
      const double slope =
          std::abs(spec.jump_rate(marks[i], t) - spec.jump_rate(marks[i - 1], t)) /
          (marks[i] - marks[i - 1]);
      diag.lipschitz_estimate = std::max(diag.lipschitz_estimate, slope);
      if (slope > max_slope) {
        diag.warnings.push_back(fmt::format(
            "jump rate varies by {} per unit mark between {} and {} at t={} (threshold {})", slope,
            marks[i - 1], marks[i], t, max_slope));
      }
    }
  }
  return diag;
}

}  // namespace mrp
