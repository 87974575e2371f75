#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mrp/counting.hpp"
#include "mrp/estimate.hpp"

namespace mrp {

/// Continuous smoothing kernel supported on [-1, 1]. The constructor checks
/// numerically that the kernel integrates to 1 and that the declared total
/// variation is right; DomainError otherwise.
class Kernel {
 public:
  Kernel(std::string name, std::function<double(double)> profile, double total_variation);

  // Zero outside [-1, 1].
  double operator()(double v) const { return (v < -1.0 || v > 1.0) ? 0.0 : profile_(v); }

  const std::string& name() const noexcept { return name_; }
  double total_variation() const noexcept { return total_variation_; }

 private:
  std::string name_;
  std::function<double(double)> profile_;
  double total_variation_;
};

Kernel epanechnikov();
Kernel biweight();
Kernel triangular();
Kernel kernel_by_name(std::string_view name);

/// Values on the uniform grid grid[i] = i * t_max / (n - 1).
struct SampledCurve {
  std::vector<double> grid;
  std::vector<double> values;

  double spacing() const { return grid.size() < 2 ? 0.0 : grid[1] - grid[0]; }
};

std::vector<double> uniform_grid(double t_max, std::size_t points);

/// max(h^-alpha, b_min).
double bandwidth_from_visits(std::size_t visits, double alpha, double b_min);

/// (1/b) sum_{jumps s_i in [0, t_max]} K((u - s_i)/b) * jump_i.
/// No boundary correction.
double smooth_at(const StepFunction& lhat, const Kernel& k, double b, double t_max, double u);

SampledCurve kernel_smooth(const StepFunction& lhat, const Kernel& k, double b, double t_max,
                           std::size_t grid_points);

struct RateValue {
  double rate = 0.0;
  // Query time outside the report window, where kernel edge bias applies.
  bool edge = false;
};

/// Partition-based jump-rate estimator. Each cell is smoothed with its own
/// bandwidth from its visit count; cells failing the empirical-measure
/// threshold give the zero curve.
struct GlobalRate {
  GlobalCumulative cumulative;
  std::vector<SampledCurve> curves;
  std::vector<double> bandwidths;
  Kernel kernel;
  double report_low = 0.0;
  double report_high = 0.0;

  // DomainError when s is outside [0, t_max].
  RateValue operator()(double x, double s) const;
};

/// b_min <= 0 selects the default floor of two grid spacings.
GlobalRate global_rate(const GlobalCumulative& gc, const Kernel& k, double alpha, double report_low,
                       double report_high, std::size_t grid_points = 512, double b_min = 0.0);

GlobalRate global_rate(const Trajectory& traj, const Partition& p, const ProcessSpec& spec,
                       const Kernel& k, double alpha, double t_max, double report_low,
                       double report_high, std::size_t grid_points = 512, double b_min = 0.0);

/// CSV `time,rate,flag_edge`.
void write_rate_csv(std::ostream& out, const SampledCurve& curve, double report_low,
                    double report_high);

}  // namespace mrp
