#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "mrp/partition.hpp"
#include "mrp/simulate.hpp"

namespace mrp {

/// Right-continuous pure-jump function
///   value(t) = origin + sum of increments at times <= t.
/// Jumps sharing a time (within `tie_tolerance` of the first jump of a run)
/// are merged at construction, so times are strictly increasing.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> times, std::vector<double> increments, double origin = 0.0,
               double tie_tolerance = 0.0);

  double operator()(double t) const;
  // lim_{s -> t-} value(s)
  double left_limit(double t) const;

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> increments() const noexcept { return increments_; }
  double origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  // Drops every jump strictly after t_max.
  StepFunction truncated(double t_max) const;
  StepFunction scaled(double factor) const;
  friend StepFunction operator+(const StepFunction& a, const StepFunction& b);

 private:
  std::vector<double> times_;
  std::vector<double> increments_;
  std::vector<double> levels_;  // value just after each jump
  double origin_ = 0.0;
};

/// Writes `time,value` rows of cumulative levels, preceded by a comment line
/// stating the right-continuous convention. The first row is the origin at 0.
void write_step_csv(std::ostream& out, const StepFunction& f);

struct Observation {
  double sojourn = 0.0;
  bool censored = false;
};

/// The sojourns S_{i+1} whose starting mark Z_i lies in a cell.
struct CellData {
  std::size_t n_total = 0;
  std::vector<Observation> observations;
  double horizon = std::numeric_limits<double>::infinity();

  std::size_t visits() const noexcept { return observations.size(); }
};

CellData cell_events(const Trajectory& traj, const Cell& cell,
                     double horizon = std::numeric_limits<double>::infinity());

/// Discrete-state selection: sojourns whose starting mark equals `state`
/// exactly.
CellData state_events(const Trajectory& traj, double state,
                      double horizon = std::numeric_limits<double>::infinity());

/// At-risk count Y(t) = #{S >= t}, censored sojourns included. Each sojourn S
/// removes one unit at nextafter(S, +inf), so Y(S) still counts S.
StepFunction risk_function(const CellData& cd);

/// N(t) = #{S <= t}, one unit per retained sojourn, ties merged.
StepFunction count_function(const CellData& cd, double tie_tolerance = 0.0);

/// 1/y, or 0 when y = 0.
double generalized_inverse(std::size_t y) noexcept;

/// Fraction of the marks Z_0..Z_{n-1} lying in the cell. DomainError if n = 0.
double empirical_measure(const Trajectory& traj, const Cell& cell);

}  // namespace mrp
