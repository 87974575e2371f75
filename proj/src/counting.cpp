#include "mrp/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mrp/errors.hpp"

namespace mrp {

StepFunction::StepFunction(std::vector<double> times, std::vector<double> increments, double origin,
                           double tie_tolerance)
    : origin_(origin) {
  if (times.size() != increments.size()) {
    throw DomainError(fmt::format("step function: {} times but {} increments", times.size(),
                                  increments.size()));
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  double level = origin;
  double run_start = 0.0;
  for (std::size_t idx : order) {
    const double t = times[idx];
    if (!std::isfinite(t)) throw DomainError("step function: non-finite jump time");
    if (!times_.empty() && t - run_start <= tie_tolerance) {
      increments_.back() += increments[idx];
      level += increments[idx];
      levels_.back() = level;
      continue;
    }
    run_start = t;
    level += increments[idx];
    times_.push_back(t);
    increments_.push_back(increments[idx]);
    levels_.push_back(level);
  }
}

double StepFunction::operator()(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return origin_;
  return levels_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return origin_;
  return levels_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepFunction StepFunction::truncated(double t_max) const {
  const auto end = std::upper_bound(times_.begin(), times_.end(), t_max);
  const auto n = static_cast<std::size_t>(end - times_.begin());
  StepFunction out;
  out.origin_ = origin_;
  out.times_.assign(times_.begin(), times_.begin() + n);
  out.increments_.assign(increments_.begin(), increments_.begin() + n);
  out.levels_.assign(levels_.begin(), levels_.begin() + n);
  return out;
}

StepFunction StepFunction::scaled(double factor) const {
  StepFunction out = *this;
  out.origin_ *= factor;
  for (double& d : out.increments_) d *= factor;
  for (double& l : out.levels_) l *= factor;
  return out;
}

StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  std::vector<double> times(a.times_);
  times.insert(times.end(), b.times_.begin(), b.times_.end());
  std::vector<double> increments(a.increments_);
  increments.insert(increments.end(), b.increments_.begin(), b.increments_.end());
  return StepFunction(std::move(times), std::move(increments), a.origin_ + b.origin_);
}

void write_step_csv(std::ostream& out, const StepFunction& f) {
  out << "# right-continuous: value holds on [time, next time)\n";
  out << "time,value\n";
  fmt::print(out, "{:.17g},{:.17g}\n", 0.0, f(0.0));
  for (double t : f.times()) {
    if (t <= 0.0) continue;
    fmt::print(out, "{:.17g},{:.17g}\n", t, f(t));
  }
}

CellData cell_events(const Trajectory& traj, const Cell& cell, double horizon) {
  CellData cd;
  cd.n_total = traj.jumps();
  cd.horizon = horizon;
  for (std::size_t i = 0; i < traj.jumps(); ++i) {
    if (cell.contains(traj.marks[i])) {
      cd.observations.push_back({traj.sojourns[i], traj.censored[i]});
    }
  }
  return cd;
}

CellData state_events(const Trajectory& traj, double state, double horizon) {
  CellData cd;
  cd.n_total = traj.jumps();
  cd.horizon = horizon;
  for (std::size_t i = 0; i < traj.jumps(); ++i) {
    if (traj.marks[i] == state) cd.observations.push_back({traj.sojourns[i], traj.censored[i]});
  }
  return cd;
}

StepFunction risk_function(const CellData& cd) {
  std::vector<double> times;
  times.reserve(cd.visits());
  for (const Observation& o : cd.observations) {
    times.push_back(std::nextafter(o.sojourn, std::numeric_limits<double>::infinity()));
  }
  std::vector<double> increments(times.size(), -1.0);
  return StepFunction(std::move(times), std::move(increments), static_cast<double>(cd.visits()));
}

StepFunction count_function(const CellData& cd, double tie_tolerance) {
  std::vector<double> times;
  times.reserve(cd.visits());
  for (const Observation& o : cd.observations) times.push_back(o.sojourn);
  std::vector<double> increments(times.size(), 1.0);
  return StepFunction(std::move(times), std::move(increments), 0.0, tie_tolerance);
}

double generalized_inverse(std::size_t y) noexcept {
  return y == 0 ? 0.0 : 1.0 / static_cast<double>(y);
}

double empirical_measure(const Trajectory& traj, const Cell& cell) {
  const std::size_t n = traj.jumps();
  if (n == 0) throw DomainError("empirical_measure: trajectory has no sojourns");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cell.contains(traj.marks[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace mrp
