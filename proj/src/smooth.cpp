#include "mrp/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr int kSimpsonPanels = 20000;  // even, so v = 0 is a node
constexpr int kVariationPoints = 200001;

}  // namespace

Kernel::Kernel(std::string name, std::function<double(double)> profile, double total_variation)
    : name_(std::move(name)), profile_(std::move(profile)), total_variation_(total_variation) {
  const double h = 2.0 / kSimpsonPanels;
  double integral = (*this)(-1.0) + (*this)(1.0);
  for (int i = 1; i < kSimpsonPanels; ++i) {
    integral += (i % 2 == 1 ? 4.0 : 2.0) * (*this)(-1.0 + i * h);
  }
  integral *= h / 3.0;
  if (std::abs(integral - 1.0) > 1e-9) {
    throw DomainError(fmt::format("kernel '{}' integrates to {}, not 1", name_, integral));
  }

  double variation = 0.0;
  double prev = (*this)(-1.0);
  for (int i = 1; i < kVariationPoints; ++i) {
    const double v = i + 1 == kVariationPoints ? 1.0 : -1.0 + 2.0 * i / (kVariationPoints - 1);
    const double cur = (*this)(v);
    if (cur < 0.0) throw DomainError(fmt::format("kernel '{}' is negative at {}", name_, v));
    variation += std::abs(cur - prev);
    prev = cur;
  }
  if (std::abs(variation - total_variation_) > 1e-6) {
    throw DomainError(fmt::format("kernel '{}' declares total variation {} but measures {}", name_,
                                  total_variation_, variation));
  }
}

Kernel epanechnikov() {
  return Kernel("epanechnikov", [](double v) { return 0.75 * (1.0 - v * v); }, 1.5);
}

Kernel biweight() {
  return Kernel(
      "biweight",
      [](double v) {
        const double w = 1.0 - v * v;
        return 0.9375 * w * w;
      },
      1.875);
}

Kernel triangular() {
  return Kernel("triangular", [](double v) { return 1.0 - std::abs(v); }, 2.0);
}

Kernel kernel_by_name(std::string_view name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "biweight") return biweight();
  if (name == "triangular") return triangular();
  throw DomainError(fmt::format("unknown kernel '{}'", name));
}

std::vector<double> uniform_grid(double t_max, std::size_t points) {
  if (points < 2) throw DomainError("a grid needs at least 2 points");
  if (!(t_max > 0.0)) throw DomainError(fmt::format("grid end {} must be > 0", t_max));
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = t_max;
  return grid;
}

double bandwidth_from_visits(std::size_t visits, double alpha, double b_min) {
  if (visits == 0) throw DomainError("bandwidth rule needs at least one visit");
  return std::max(std::pow(static_cast<double>(visits), -alpha), b_min);
}

double smooth_at(const StepFunction& lhat, const Kernel& k, double b, double t_max, double u) {
  if (!(b > 0.0)) throw DomainError(fmt::format("bandwidth must be > 0, got {}", b));
  const auto times = lhat.times();
  const auto jumps = lhat.increments();
  // Only jumps within (u - b, u + b) can contribute.
  const auto first = std::lower_bound(times.begin(), times.end(), std::max(0.0, u - b));
  double sum = 0.0;
  for (auto it = first; it != times.end() && *it <= std::min(t_max, u + b); ++it) {
    const auto i = static_cast<std::size_t>(it - times.begin());
    sum += k((u - *it) / b) * jumps[i];
  }
  return sum / b;
}

SampledCurve kernel_smooth(const StepFunction& lhat, const Kernel& k, double b, double t_max,
                           std::size_t grid_points) {
  if (!(b > 0.0)) throw DomainError(fmt::format("bandwidth must be > 0, got {}", b));
  SampledCurve curve;
  curve.grid = uniform_grid(t_max, grid_points);
  curve.values.reserve(grid_points);
  for (double u : curve.grid) curve.values.push_back(smooth_at(lhat, k, b, t_max, u));
  return curve;
}

RateValue GlobalRate::operator()(double x, double s) const {
  if (!(s >= 0.0 && s <= cumulative.t_max)) {
    throw DomainError(
        fmt::format("rate estimate queried at s = {} outside [0, {}]", s, cumulative.t_max));
  }
  RateValue out;
  out.edge = s < report_low || s > report_high;
  const auto k = locate(cumulative.partition, x);
  if (!k || !cumulative.per_cell[*k].threshold_passed) return out;
  out.rate = smooth_at(cumulative.per_cell[*k].lhat, kernel, bandwidths[*k], cumulative.t_max, s);
  return out;
}

GlobalRate global_rate(const GlobalCumulative& gc, const Kernel& k, double alpha, double report_low,
                       double report_high, std::size_t grid_points, double b_min) {
  if (!(0.0 < report_low && report_low < report_high && report_high < gc.t_max)) {
    throw DomainError(fmt::format("report window [{}, {}] must satisfy 0 < r1 < r2 < t_max = {}",
                                  report_low, report_high, gc.t_max));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(fmt::format("bandwidth exponent {} not in (0, 1)", alpha));
  }
  if (grid_points < 2) throw DomainError("a grid needs at least 2 points");
  if (b_min <= 0.0) b_min = 2.0 * gc.t_max / static_cast<double>(grid_points - 1);

  GlobalRate gr{gc, {}, {}, k, report_low, report_high};
  for (const CumulativeEstimate& ce : gc.per_cell) {
    if (!ce.threshold_passed || ce.visits == 0) {
      gr.bandwidths.push_back(0.0);
      SampledCurve zero;
      zero.grid = uniform_grid(gc.t_max, grid_points);
      zero.values.assign(grid_points, 0.0);
      gr.curves.push_back(std::move(zero));
      continue;
    }
    const double b = bandwidth_from_visits(ce.visits, alpha, b_min);
    gr.bandwidths.push_back(b);
    gr.curves.push_back(kernel_smooth(ce.lhat, k, b, gc.t_max, grid_points));
  }
  return gr;
}

GlobalRate global_rate(const Trajectory& traj, const Partition& p, const ProcessSpec& spec,
                       const Kernel& k, double alpha, double t_max, double report_low,
                       double report_high, std::size_t grid_points, double b_min) {
  return global_rate(global_cumulative(traj, p, spec, t_max), k, alpha, report_low, report_high,
                     grid_points, b_min);
}

void write_rate_csv(std::ostream& out, const SampledCurve& curve, double report_low,
                    double report_high) {
  out << "time,rate,flag_edge\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double t = curve.grid[i];
    const bool edge = t < report_low || t > report_high;
    fmt::print(out, "{:.17g},{:.17g},{}\n", t, curve.values[i], edge ? 1 : 0);
  }
}

}  // namespace mrp
