#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrp/counting.hpp"
#include "mrp/model.hpp"
#include "mrp/partition.hpp"
#include "mrp/rng.hpp"
#include "mrp/smooth.hpp"

namespace mrp {

using Oracle = std::function<double(double)>;

/// Trapezoid integral of (curve - oracle)^2 over [a, b] on the curve grid;
/// partial end segments use linear interpolation of the curve.
double integrated_square_error(const SampledCurve& curve, const Oracle& oracle, double a, double b);

/// max |step - oracle| over a uniform grid of [a, b] plus every jump of the
/// step function in [a, b] and its left limit there.
double sup_distance(const StepFunction& step, const Oracle& oracle, double a, double b,
                    std::size_t grid_points);

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;  // delete-one jackknife
  std::size_t visits = 0;
};

/// Monte-Carlo approximation of l(A, t) = int_A f(z,t) nu(dz) / int_A G(z,t) nu(dz)
/// with nu replaced by the post-burn-in marks of a simulated chain started at
/// z0 (the cell midpoint by default). Evaluated as the survival-weighted mean
/// of the jump rate, which equals the density/survival ratio and is exactly c
/// for a constant rate c. Throws DegenerateDataError if the cell is never
/// visited after burn-in.
OracleEstimate mc_oracle_l_detailed(const ProcessSpec& spec, const Cell& cell, double t,
                                    std::size_t burn_in, std::size_t samples, Seed seed,
                                    std::optional<double> z0 = std::nullopt);

double mc_oracle_l(const ProcessSpec& spec, const Cell& cell, double t, std::size_t burn_in,
                   std::size_t samples, Seed seed);

struct ReplicateSummary {
  std::vector<double> values;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Type-7 (linear interpolation) quantile of sorted data.
double quantile_type7(std::span<const double> sorted, double p);

ReplicateSummary boxplot_summary(std::vector<double> values);

/// {n, metric, min, q1, median, q3, max}
nlohmann::json summary_to_json(std::size_t n, const std::string& metric, const ReplicateSummary& s);

}  // namespace mrp
