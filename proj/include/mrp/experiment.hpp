#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrp/estimate.hpp"
#include "mrp/metrics.hpp"
#include "mrp/model.hpp"
#include "mrp/rng.hpp"
#include "mrp/simulate.hpp"
#include "mrp/smooth.hpp"

namespace mrp {

/// Every number of the reference reliability experiment is a default here.
/// The estimation region defaults to [center_mark - cell_radius,
/// center_mark + cell_radius] unless region_low/region_high are set.
struct ExperimentConfig {
  std::string model = "machine";
  double z0 = 30.0;
  std::vector<std::size_t> sample_sizes{200, 300, 400};
  std::size_t replicates = 100;
  Seed master_seed{20100402};
  bool region_set = false;
  double region_low = 18.0;
  double region_high = 22.0;
  double partition_width = 4.0;
  double center_mark = 20.0;
  double cell_radius = 2.0;
  double t_max = 0.9;
  double report_low = 0.2;
  double report_high = 0.8;
  std::string kernel = "epanechnikov";
  double alpha = 0.25;
  std::size_t grid_points = 512;
  std::string output_dir = "mrp-out";
};

/// Flat `key = value` text, `#` or `;` comments. Unknown keys and malformed
/// values are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Exhaustive listing of every key with its value; parse_config reads it back.
std::string format_config(const ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Checks r1 < r2 < t_max < min cell horizon, replicates >= 1 and that the
/// center mark lies in the region. Throws DomainError.
void validate_config(const ExperimentConfig& cfg, const ProcessSpec& spec);

Partition config_partition(const ExperimentConfig& cfg, const ProcessSpec& spec);

/// Everything estimated from one trajectory, seen from the center mark.
struct TrajectoryAnalysis {
  GlobalRate rate;
  std::size_t center_cell = 0;
  SampledCurve cumulative_curve;  // Lambda-hat(center, .) on [0, t_max]
  SampledCurve rate_curve;        // lambda-hat(center, .) on [0, t_max]
  bool gated = false;             // center cell failed the nu-hat threshold
};

TrajectoryAnalysis analyze_trajectory(const Trajectory& traj, const ExperimentConfig& cfg,
                                      const ProcessSpec& spec);

struct ReplicateResult {
  std::size_t sample_size = 0;
  std::size_t replicate = 0;
  bool ok = false;
  std::string error;
  double ise_cumulative = 0.0;  // on [0, r2]
  double ise_rate = 0.0;        // on [r1, r2]
  double visit_fraction = 0.0;
  double cumulative_at_report_end = 0.0;  // Lambda-hat(center, r2)
  double rate_mae = 0.0;  // mean |lambda-hat - lambda| over grid points in [r1, r2]
  double simulate_seconds = 0.0;
  double estimate_seconds = 0.0;
};

Seed replicate_seed(Seed master, std::size_t sample_size, std::size_t replicate);

ReplicateResult run_replicate(const ExperimentConfig& cfg, const ProcessSpec& spec,
                              std::size_t sample_size, std::size_t replicate);

struct MetricSummary {
  std::size_t sample_size = 0;
  std::string metric;  // "ISE_Lambda" or "ISE_lambda"
  ReplicateSummary summary;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicateResult> replicates;  // ordered by (size, replicate)
  std::vector<MetricSummary> summaries;
  double visit_fraction_mean = 0.0;
  double simulate_seconds = 0.0;
  double estimate_seconds = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Full replicate study on `jobs` worker threads. The result does not depend
/// on `jobs` or on scheduling order (apart from runtime fields).
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t jobs);

nlohmann::json report_to_json(const ExperimentReport& report, bool include_runtimes = true);

/// `sample_size,replicate,ise_lambda_cum,ise_lambda`, successful replicates only.
void write_ise_csv(std::ostream& out, const ExperimentReport& report);

// Command back ends. Each writes into cfg.output_dir and returns the paths
// written; IoError when the directory or a file cannot be written.
std::vector<std::filesystem::path> simulate_command(const ExperimentConfig& cfg);

struct EstimateOutput {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};
EstimateOutput estimate_command(const std::filesystem::path& trajectory, const ExperimentConfig& cfg);

struct ExperimentOutput {
  ExperimentReport report;
  std::vector<std::filesystem::path> files;
};
ExperimentOutput experiment_command(const ExperimentConfig& cfg, std::size_t jobs);

}  // namespace mrp
