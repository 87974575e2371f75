#include "mrp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

struct EventGroup {
  double time;
  double multiplicity;
  double at_risk;
};

// Distinct uncensored event times with their multiplicity and at-risk count.
std::vector<EventGroup> event_groups(const CellData& cd, double tie_tolerance) {
  std::vector<double> all;
  std::vector<double> events;
  all.reserve(cd.visits());
  for (const Observation& o : cd.observations) {
    all.push_back(o.sojourn);
    if (!o.censored) events.push_back(o.sojourn);
  }
  std::sort(all.begin(), all.end());
  std::sort(events.begin(), events.end());

  std::vector<EventGroup> groups;
  for (std::size_t i = 0; i < events.size();) {
    const double start = events[i];
    std::size_t j = i;
    while (j < events.size() && events[j] - start <= tie_tolerance) ++j;
    const auto at_risk =
        static_cast<double>(all.end() - std::lower_bound(all.begin(), all.end(), start));
    groups.push_back({start, static_cast<double>(j - i), at_risk});
    i = j;
  }
  return groups;
}

}  // namespace

StepFunction nelson_aalen(const CellData& cd, double tie_tolerance) {
  std::vector<double> times;
  std::vector<double> jumps;
  for (const EventGroup& g : event_groups(cd, tie_tolerance)) {
    times.push_back(g.time);
    jumps.push_back(g.multiplicity / g.at_risk);
  }
  return StepFunction(std::move(times), std::move(jumps));
}

StepFunction variance_estimate(const CellData& cd, double tie_tolerance) {
  std::vector<double> times;
  std::vector<double> jumps;
  for (const EventGroup& g : event_groups(cd, tie_tolerance)) {
    times.push_back(g.time);
    jumps.push_back(g.multiplicity / (g.at_risk * g.at_risk));
  }
  return StepFunction(std::move(times), std::move(jumps));
}

std::pair<double, double> confidence_band(const CumulativeEstimate& ce, double t, double level) {
  if (!(t >= 0.0 && t < ce.horizon)) {
    throw DomainError(fmt::format("confidence_band: t = {} outside [0, {})", t, ce.horizon));
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError(fmt::format("confidence_band: level {} not in (0, 1)", level));
  }
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  const double center = ce.lhat(t);
  const double half = z * std::sqrt(ce.variance(t));
  return {std::max(0.0, center - half), center + half};
}

CumulativeEstimate estimate_cell(const Trajectory& traj, const Cell& cell, const ProcessSpec& spec,
                                 double t_max) {
  const double horizon = cell_horizon(spec, cell);
  if (!(t_max >= 0.0 && t_max < horizon)) {
    throw DomainError(fmt::format("estimation window [0, {}] must end before the cell horizon {}",
                                  t_max, horizon));
  }
  const CellData cd = cell_events(traj, cell, horizon);

  CumulativeEstimate ce;
  ce.lhat = nelson_aalen(cd).truncated(t_max);
  ce.variance = variance_estimate(cd).truncated(t_max);
  ce.visits = cd.visits();
  ce.horizon = horizon;
  ce.t_max = t_max;
  const std::size_t n = traj.jumps();
  if (n > 0) {
    ce.nu_hat = empirical_measure(traj, cell);
    ce.threshold_passed = ce.nu_hat > 1.0 / std::sqrt(static_cast<double>(n));
  }
  return ce;
}

GlobalCumulative global_cumulative(const Trajectory& traj, const Partition& p,
                                   const ProcessSpec& spec, double t_max) {
  GlobalCumulative gc;
  gc.partition = p;
  gc.t_max = t_max;
  gc.per_cell.reserve(p.cells.size());
  for (const Cell& cell : p.cells) gc.per_cell.push_back(estimate_cell(traj, cell, spec, t_max));
  return gc;
}

double GlobalCumulative::operator()(double x, double s) const {
  if (!(s >= 0.0 && s <= t_max)) {
    throw DomainError(fmt::format("cumulative estimate queried at s = {} outside [0, {}]", s, t_max));
  }
  const auto k = locate(partition, x);
  if (!k || !per_cell[*k].threshold_passed) return 0.0;
  return per_cell[*k].lhat(s);
}

void write_estimate_csv(std::ostream& out, const CumulativeEstimate& ce, std::size_t grid_points,
                        double level) {
  if (grid_points < 2) throw DomainError("estimate CSV needs at least 2 grid points");
  out << "time,estimate,variance,ci_low,ci_high\n";
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = ce.t_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const auto [lo, hi] = confidence_band(ce, t, level);
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, ce.lhat(t), ce.variance(t), lo,
               hi);
  }
}

}  // namespace mrp
