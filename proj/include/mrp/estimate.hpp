#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mrp/counting.hpp"
#include "mrp/model.hpp"
#include "mrp/partition.hpp"
#include "mrp/simulate.hpp"

namespace mrp {

/// Nelson-Aalen estimate of L(A, .) on one cell together with its plug-in
/// variance. Both step functions carry no jump beyond t_max.
struct CumulativeEstimate {
  StepFunction lhat;
  StepFunction variance;
  std::size_t visits = 0;
  double nu_hat = 0.0;
  bool threshold_passed = false;
  double horizon = 0.0;
  double t_max = 0.0;
};

/// Partition-based estimator of the cumulative rate: the cell containing x
/// supplies its L-hat when its empirical measure exceeds n^{-1/2}, and 0
/// otherwise.
struct GlobalCumulative {
  Partition partition;
  std::vector<CumulativeEstimate> per_cell;
  double t_max = 0.0;

  // DomainError when s is outside [0, t_max].
  double operator()(double x, double s) const;
};

/// int_0^t Y(s)^+ dN(s): a jump m / Y(s) at each distinct uncensored sojourn
/// time s of multiplicity m, where Y(s) = #{S >= s} counts censored sojourns
/// too. Censored sojourns never produce a jump.
StepFunction nelson_aalen(const CellData& cd, double tie_tolerance = 0.0);

/// Plug-in variance: jump m / Y(s)^2 at each distinct uncensored event time.
StepFunction variance_estimate(const CellData& cd, double tie_tolerance = 0.0);

/// Pointwise normal band L-hat(t) -/+ z_{(1+level)/2} sqrt(var(t)), low end
/// floored at 0. Asymptotic; relies on an assumption that cannot be checked
/// from data.
std::pair<double, double> confidence_band(const CumulativeEstimate& ce, double t, double level);

/// Requires t_max < cell_horizon(spec, cell).
CumulativeEstimate estimate_cell(const Trajectory& traj, const Cell& cell, const ProcessSpec& spec,
                                 double t_max);

/// Requires t_max below every cell horizon.
GlobalCumulative global_cumulative(const Trajectory& traj, const Partition& p,
                                   const ProcessSpec& spec, double t_max);

/// CSV `time,estimate,variance,ci_low,ci_high` on a uniform grid over [0, t_max].
void write_estimate_csv(std::ostream& out, const CumulativeEstimate& ce, std::size_t grid_points = 512,
                        double level = 0.95);

}  // namespace mrp
