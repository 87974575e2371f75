#include "mrp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mrp/errors.hpp"
#include "mrp/simulate.hpp"

namespace mrp {

namespace {

double interpolate(const SampledCurve& curve, double x) {
  const auto& g = curve.grid;
  const auto it = std::upper_bound(g.begin(), g.end(), x);
  if (it == g.end()) return curve.values.back();
  if (it == g.begin()) return curve.values.front();
  const auto i = static_cast<std::size_t>(it - g.begin()) - 1;
  const double w = (x - g[i]) / (g[i + 1] - g[i]);
  return curve.values[i] + w * (curve.values[i + 1] - curve.values[i]);
}

}  // namespace

double integrated_square_error(const SampledCurve& curve, const Oracle& oracle, double a, double b) {
  if (curve.grid.size() < 2 || curve.grid.size() != curve.values.size()) {
    throw DomainError("ISE needs a curve with at least 2 grid points");
  }
  if (!(a <= b && a >= curve.grid.front() && b <= curve.grid.back())) {
    throw DomainError(fmt::format("ISE interval [{}, {}] outside the curve grid [{}, {}]", a, b,
                                  curve.grid.front(), curve.grid.back()));
  }
  std::vector<double> xs{a};
  std::vector<double> ys{interpolate(curve, a)};
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    if (curve.grid[i] > a && curve.grid[i] < b) {
      xs.push_back(curve.grid[i]);
      ys.push_back(curve.values[i]);
    }
  }
  xs.push_back(b);
  ys.push_back(interpolate(curve, b));

  double total = 0.0;
  double prev = ys[0] - oracle(xs[0]);
  prev *= prev;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double cur = ys[i] - oracle(xs[i]);
    cur *= cur;
    total += 0.5 * (prev + cur) * (xs[i] - xs[i - 1]);
    prev = cur;
  }
  return total;
}

double sup_distance(const StepFunction& step, const Oracle& oracle, double a, double b,
                    std::size_t grid_points) {
  if (!(a <= b)) throw DomainError(fmt::format("sup_distance: empty interval [{}, {}]", a, b));
  if (grid_points < 2) throw DomainError("sup_distance needs at least 2 grid points");
  double sup = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    sup = std::max(sup, std::abs(step(s) - oracle(s)));
  }
  for (double s : step.times()) {
    if (s < a || s > b) continue;
    const double o = oracle(s);
    sup = std::max(sup, std::abs(step(s) - o));
    if (s > a) sup = std::max(sup, std::abs(step.left_limit(s) - o));
  }
  return sup;
}

OracleEstimate mc_oracle_l_detailed(const ProcessSpec& spec, const Cell& cell, double t,
                                    std::size_t burn_in, std::size_t samples, Seed seed,
                                    std::optional<double> z0) {
  const double horizon = cell_horizon(spec, cell);
  if (!(t >= 0.0 && t < horizon)) {
    throw DomainError(fmt::format("mc_oracle_l: t = {} outside [0, {})", t, horizon));
  }
  if (samples == 0) throw DomainError("mc_oracle_l: samples must be >= 1");

  Rng rng(seed);
  double z = z0.value_or(cell.midpoint());
  for (std::size_t i = 0; i < burn_in; ++i) z = sample_transition(spec, z, rng);

  std::vector<double> weights;
  std::vector<double> rates;
  for (std::size_t i = 0; i < samples; ++i) {
    z = sample_transition(spec, z, rng);
    if (!cell.contains(z)) continue;
    weights.push_back(survival(spec, z, t));
    rates.push_back(spec.jump_rate(z, t));
  }
  if (weights.empty()) {
    throw DegenerateDataError(fmt::format(
        "mc_oracle_l: no post-burn-in visit to cell [{}, {}] in {} samples", cell.low, cell.high,
        samples));
  }

  // Weighted mean shifted by the first rate: identical rates cancel exactly.
  const double base = rates.front();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    num += weights[i] * (rates[i] - base);
    den += weights[i];
  }
  OracleEstimate est;
  est.value = base + num / den;
  est.visits = weights.size();

  const std::size_t m = weights.size();
  if (m < 2) {
    est.std_error = std::numeric_limits<double>::infinity();
    return est;
  }
  std::vector<double> loo(m);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    loo[i] = base + (num - weights[i] * (rates[i] - base)) / (den - weights[i]);
    loo_mean += loo[i];
  }
  loo_mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  est.std_error = std::sqrt(static_cast<double>(m - 1) / static_cast<double>(m) * ss);
  return est;
}

double mc_oracle_l(const ProcessSpec& spec, const Cell& cell, double t, std::size_t burn_in,
                   std::size_t samples, Seed seed) {
  return mc_oracle_l_detailed(spec, cell, t, burn_in, samples, seed).value;
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of empty data");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

ReplicateSummary boxplot_summary(std::vector<double> values) {
  if (values.empty()) throw DomainError("boxplot_summary: no values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  ReplicateSummary s;
  s.values = std::move(values);
  s.min = sorted.front();
  s.q1 = quantile_type7(sorted, 0.25);
  s.median = quantile_type7(sorted, 0.5);
  s.q3 = quantile_type7(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

nlohmann::json summary_to_json(std::size_t n, const std::string& metric, const ReplicateSummary& s) {
  return {{"n", n},           {"metric", metric}, {"min", s.min}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3},       {"max", s.max}};
}

}  // namespace mrp
