#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mrp/model.hpp"

namespace mrp {

/// [low, high), or [low, high] when closed_right.
struct Cell {
  double low = 0.0;
  double high = 0.0;
  bool closed_right = false;

  bool contains(double x) const noexcept {
    return low <= x && (x < high || (closed_right && x == high));
  }
  double diameter() const noexcept { return high - low; }
  double midpoint() const noexcept { return 0.5 * (low + high); }
};

/// Contiguous half-open cells covering [region_low, region_high]; the last
/// cell is closed on the right.
struct Partition {
  std::vector<Cell> cells;
  double region_low = 0.0;
  double region_high = 0.0;
};

/// ceil((high - low) / width) cells of diameter `width`, the last one possibly
/// narrower. The region must stay at positive distance from the boundary of
/// the state space, otherwise DomainError.
Partition uniform_partition(const StateSpace& space, double region_low, double region_high,
                            double width);

/// Partition made of the single closed cell [center - radius, center + radius].
Partition ball_partition(const StateSpace& space, double center, double radius);

std::optional<std::size_t> locate(const Partition& p, double x);

/// inf of the censorship time over the cell, evaluated on a 1024-point grid
/// that includes both edges (exact for constant or monotone censorship).
double cell_horizon(const ProcessSpec& spec, const Cell& cell);

/// [[low, high], ...]
nlohmann::json partition_to_json(const Partition& p);

}  // namespace mrp
