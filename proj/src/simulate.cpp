#include "mrp/simulate.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr double kTimeTolerance = 1e-10;
constexpr int kMaxBracketDoublings = 200;

double invert_by_bisection(const ProcessSpec& spec, double z, double target, double lo, double hi) {
  while (hi - lo > kTimeTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cumulative_rate(spec, z, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("cannot parse {} from '{}'", what, field), line);
  }
  return value;
}

}  // namespace

SojournDraw sample_sojourn(const ProcessSpec& spec, double z, double u) {
  if (!spec.state_space.contains(z)) {
    throw DomainError(fmt::format("sample_sojourn: mark {} outside the state space", z));
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError(fmt::format("sample_sojourn: u = {} not in (0, 1)", u));
  }
  const double target = -std::log(u);
  const double horizon = spec.censorship(z);

  if (spec.inverse_cumulative) {
    const double s = spec.inverse_cumulative(z, target);
    if (s < horizon) return {s, false};
    return {horizon, true};
  }

  if (std::isfinite(horizon)) {
    if (cumulative_rate(spec, z, horizon) <= target) return {horizon, true};
    return {invert_by_bisection(spec, z, target, 0.0, horizon), false};
  }

  double hi = 1.0;
  int doublings = 0;
  while (cumulative_rate(spec, z, hi) < target) {
    if (++doublings > kMaxBracketDoublings) {
      throw NumericError(
          fmt::format("sample_sojourn: cannot bracket cumulative rate level {} at mark {}", target, z));
    }
    hi *= 2.0;
  }
  return {invert_by_bisection(spec, z, target, 0.0, hi), false};
}

double sample_transition(const ProcessSpec& spec, double z, Rng& rng) {
  if (!spec.state_space.contains(z)) {
    throw DomainError(fmt::format("sample_transition: mark {} outside the state space", z));
  }
  return spec.kernel_sampler(z, rng);
}

Trajectory simulate_chain(const ProcessSpec& spec, double z0, std::size_t n_jumps, Seed seed) {
  if (!spec.state_space.contains(z0)) {
    throw DomainError(fmt::format("simulate_chain: initial mark {} outside the state space", z0));
  }
  Rng rng(seed);
  Trajectory traj;
  traj.marks.reserve(n_jumps + 1);
  traj.sojourns.reserve(n_jumps);
  traj.censored.reserve(n_jumps);
  traj.marks.push_back(z0);
  double z = z0;
  for (std::size_t i = 0; i < n_jumps; ++i) {
    const SojournDraw draw = sample_sojourn(spec, z, rng.uniform_open());
    traj.sojourns.push_back(draw.sojourn);
    traj.censored.push_back(draw.censored);
    z = sample_transition(spec, z, rng);
    traj.marks.push_back(z);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "index,mark,sojourn,censored\n";
  if (traj.marks.empty()) return;
  fmt::print(out, "0,{:.17g},,\n", traj.marks[0]);
  for (std::size_t i = 1; i < traj.marks.size(); ++i) {
    fmt::print(out, "{},{:.17g},{:.17g},{}\n", i, traj.marks[i], traj.sojourns[i - 1],
               traj.censored[i - 1] ? 1 : 0);
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,mark,sojourn,censored") {
    throw ParseError(fmt::format("unexpected header '{}'", line), line_no);
  }

  Trajectory traj;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      throw ParseError(fmt::format("expected 4 fields, found {}", fields.size()), line_no);
    }
    const auto index = parse_number<std::size_t>(fields[0], line_no, "index");
    if (index != traj.marks.size()) {
      throw ParseError(fmt::format("index {} out of sequence (expected {})", index, traj.marks.size()),
                       line_no);
    }
    traj.marks.push_back(parse_number<double>(fields[1], line_no, "mark"));
    if (index == 0) {
      if (!fields[2].empty() || !fields[3].empty()) {
        throw ParseError("row 0 must have empty sojourn and censored fields", line_no);
      }
      continue;
    }
    const double s = parse_number<double>(fields[2], line_no, "sojourn");
    if (!(s > 0.0)) throw ParseError(fmt::format("sojourn {} is not positive", s), line_no);
    const int flag = parse_number<int>(fields[3], line_no, "censored flag");
    if (flag != 0 && flag != 1) throw ParseError("censored flag must be 0 or 1", line_no);
    traj.sojourns.push_back(s);
    traj.censored.push_back(flag == 1);
  }
  if (traj.marks.empty()) throw ParseError("trajectory has no rows", line_no);
  return traj;
}

}  // namespace mrp
