#include "mrp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr int kHorizonGrid = 1024;

void require_interior(const StateSpace& space, double low, double high) {
  if (!(low < high)) {
    throw DomainError(fmt::format("empty region [{}, {}]", low, high));
  }
  if (!(space.lower < low && high < space.upper)) {
    throw DomainError(fmt::format("region [{}, {}] must be at positive distance from the boundary "
                                  "of ({}, {})",
                                  low, high, space.lower, space.upper));
  }
}

}  // namespace

Partition uniform_partition(const StateSpace& space, double region_low, double region_high,
                            double width) {
  require_interior(space, region_low, region_high);
  if (!(width > 0.0)) throw DomainError(fmt::format("cell width must be > 0, got {}", width));

  // Guard against ratios like 4/1 landing a hair above an integer.
  const double ratio = (region_high - region_low) / width;
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-12)));

  Partition p;
  p.region_low = region_low;
  p.region_high = region_high;
  p.cells.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double low = region_low + static_cast<double>(k) * width;
    const bool last = k + 1 == count;
    const double high = last ? region_high : region_low + static_cast<double>(k + 1) * width;
    p.cells.push_back({low, high, last});
  }
  return p;
}

Partition ball_partition(const StateSpace& space, double center, double radius) {
  if (!(radius > 0.0)) throw DomainError(fmt::format("cell radius must be > 0, got {}", radius));
  require_interior(space, center - radius, center + radius);
  return Partition{{Cell{center - radius, center + radius, true}}, center - radius, center + radius};
}

std::optional<std::size_t> locate(const Partition& p, double x) {
  if (p.cells.empty() || x < p.region_low || x > p.region_high) return std::nullopt;
  // First cell whose low exceeds x, then step back one.
  const auto it = std::upper_bound(p.cells.begin(), p.cells.end(), x,
                                   [](double v, const Cell& c) { return v < c.low; });
  if (it == p.cells.begin()) return std::nullopt;
  const auto index = static_cast<std::size_t>(std::distance(p.cells.begin(), it) - 1);
  if (!p.cells[index].contains(x)) return std::nullopt;
  return index;
}

double cell_horizon(const ProcessSpec& spec, const Cell& cell) {
  if (!(spec.state_space.contains(cell.low) && spec.state_space.contains(cell.high))) {
    throw DomainError(
        fmt::format("cell [{}, {}] not inside the state space", cell.low, cell.high));
  }
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kHorizonGrid; ++i) {
    const double x =
        i + 1 == kHorizonGrid ? cell.high : cell.low + cell.diameter() * i / (kHorizonGrid - 1);
    inf = std::min(inf, spec.censorship(x));
  }
  if (!(inf > 0.0)) {
    throw DomainError(
        fmt::format("censorship infimum {} on cell [{}, {}] is not positive", inf, cell.low, cell.high));
  }
  return inf;
}

nlohmann::json partition_to_json(const Partition& p) {
  auto out = nlohmann::json::array();
  for (const Cell& c : p.cells) out.push_back({c.low, c.high});
  return out;
}

}  // namespace mrp
