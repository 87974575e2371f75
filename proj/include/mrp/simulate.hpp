#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mrp/model.hpp"
#include "mrp/rng.hpp"

namespace mrp {

/// One observation of the embedded chain: marks Z_0..Z_n, sojourns
/// S_1..S_n (sojourns[i] is the time spent in marks[i]) and censor flags.
struct Trajectory {
  std::vector<double> marks;
  std::vector<double> sojourns;
  std::vector<bool> censored;

  std::size_t jumps() const noexcept { return sojourns.size(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct SojournDraw {
  double sojourn = 0.0;
  bool censored = false;
};

/// Inverse-transform draw of a sojourn from mark z given u in (0, 1): solves
/// cumulative_rate(z, s) = -ln u, and returns the censorship time t*(z) with
/// censored = true when the solution does not fall below t*(z).
SojournDraw sample_sojourn(const ProcessSpec& spec, double z, double u);

/// One draw from the transition kernel Q(z, .).
double sample_transition(const ProcessSpec& spec, double z, Rng& rng);

/// Simulates n_jumps sojourn/transition pairs from Z_0 = z0. Bit-identical
/// for identical inputs.
Trajectory simulate_chain(const ProcessSpec& spec, double z0, std::size_t n_jumps, Seed seed);

/// CSV with header `index,mark,sojourn,censored`. Row 0 holds Z_0 with empty
/// sojourn and flag; row i >= 1 holds Z_i, the sojourn S_i spent in Z_{i-1}
/// before the jump into Z_i, and its censor flag (0/1). Reals are written
/// with 17 significant digits, so reading back is bit-exact.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Throws ParseError with the offending line number.
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace mrp
