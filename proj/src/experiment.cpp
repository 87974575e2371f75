#include "mrp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError(fmt::format("config key '{}': cannot parse '{}'", key, text));
  }
  return value;
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    sizes.push_back(parse_value<std::size_t>(key, item));
  }
  if (sizes.empty()) throw DomainError(fmt::format("config key '{}' is empty", key));
  return sizes;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  }
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  ExperimentConfig cfg;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"model", [&](auto&, auto& v) { cfg.model = v; }},
      {"z0", [&](auto& k, auto& v) { cfg.z0 = parse_value<double>(k, v); }},
      {"sample_sizes", [&](auto& k, auto& v) { cfg.sample_sizes = parse_sizes(k, v); }},
      {"replicates", [&](auto& k, auto& v) { cfg.replicates = parse_value<std::size_t>(k, v); }},
      {"master_seed",
       [&](auto& k, auto& v) { cfg.master_seed = Seed{parse_value<std::uint64_t>(k, v)}; }},
      {"region_low",
       [&](auto& k, auto& v) {
         cfg.region_low = parse_value<double>(k, v);
         cfg.region_set = true;
       }},
      {"region_high",
       [&](auto& k, auto& v) {
         cfg.region_high = parse_value<double>(k, v);
         cfg.region_set = true;
       }},
      {"partition_width", [&](auto& k, auto& v) { cfg.partition_width = parse_value<double>(k, v); }},
      {"center_mark", [&](auto& k, auto& v) { cfg.center_mark = parse_value<double>(k, v); }},
      {"cell_radius", [&](auto& k, auto& v) { cfg.cell_radius = parse_value<double>(k, v); }},
      {"t_max", [&](auto& k, auto& v) { cfg.t_max = parse_value<double>(k, v); }},
      {"report_window_low", [&](auto& k, auto& v) { cfg.report_low = parse_value<double>(k, v); }},
      {"report_window_high", [&](auto& k, auto& v) { cfg.report_high = parse_value<double>(k, v); }},
      {"kernel", [&](auto&, auto& v) { cfg.kernel = v; }},
      {"alpha", [&](auto& k, auto& v) { cfg.alpha = parse_value<double>(k, v); }},
      {"grid_points", [&](auto& k, auto& v) { cfg.grid_points = parse_value<std::size_t>(k, v); }},
      {"output_dir", [&](auto&, auto& v) { cfg.output_dir = v; }},
  };

  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      throw DomainError(fmt::format("config sections are not supported ('[{}]')", key));
    }
    const auto it = setters.find(key);
    if (it == setters.end()) throw DomainError(fmt::format("unknown config key '{}'", key));
    it->second(key, node.data());
  }
  if (!cfg.region_set) {
    cfg.region_low = cfg.center_mark - cfg.cell_radius;
    cfg.region_high = cfg.center_mark + cfg.cell_radius;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config '{}'", path.string()));
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  auto line = [&](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "# marked renewal process experiment\n";
  line("model", cfg.model);
  line("z0", cfg.z0);
  line("sample_sizes", fmt::format("{}", fmt::join(cfg.sample_sizes, ",")));
  line("replicates", cfg.replicates);
  line("master_seed", cfg.master_seed.value);
  out += "# estimation cell: center_mark +/- cell_radius unless region_low/region_high are given\n";
  line("center_mark", cfg.center_mark);
  line("cell_radius", cfg.cell_radius);
  line("region_low", cfg.region_low);
  line("region_high", cfg.region_high);
  line("partition_width", cfg.partition_width);
  out += "# Lambda is scored on [0, report_window_high], lambda on the report window\n";
  line("t_max", cfg.t_max);
  line("report_window_low", cfg.report_low);
  line("report_window_high", cfg.report_high);
  line("kernel", cfg.kernel);
  line("alpha", cfg.alpha);
  line("grid_points", cfg.grid_points);
  line("output_dir", cfg.output_dir);
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"model", cfg.model},
          {"z0", cfg.z0},
          {"sample_sizes", cfg.sample_sizes},
          {"replicates", cfg.replicates},
          {"master_seed", cfg.master_seed.value},
          {"region", {cfg.region_low, cfg.region_high}},
          {"partition_width", cfg.partition_width},
          {"center_mark", cfg.center_mark},
          {"cell_radius", cfg.cell_radius},
          {"t_max", cfg.t_max},
          {"report_window", {cfg.report_low, cfg.report_high}},
          {"kernel", cfg.kernel},
          {"alpha", cfg.alpha},
          {"grid_points", cfg.grid_points},
          {"output_dir", cfg.output_dir}};
}

Partition config_partition(const ExperimentConfig& cfg, const ProcessSpec& spec) {
  return uniform_partition(spec.state_space, cfg.region_low, cfg.region_high, cfg.partition_width);
}

void validate_config(const ExperimentConfig& cfg, const ProcessSpec& spec) {
  if (cfg.replicates < 1) throw DomainError("replicates must be >= 1");
  if (cfg.sample_sizes.empty()) throw DomainError("sample_sizes is empty");
  if (cfg.grid_points < 2) throw DomainError("grid_points must be >= 2");
  if (!spec.state_space.contains(cfg.z0)) {
    throw DomainError(fmt::format("z0 = {} outside the state space", cfg.z0));
  }
  const Partition p = config_partition(cfg, spec);
  if (!locate(p, cfg.center_mark)) {
    throw DomainError(fmt::format("center_mark {} outside the region [{}, {}]", cfg.center_mark,
                                  cfg.region_low, cfg.region_high));
  }
  double min_horizon = std::numeric_limits<double>::infinity();
  for (const Cell& c : p.cells) min_horizon = std::min(min_horizon, cell_horizon(spec, c));
  if (!(0.0 < cfg.report_low && cfg.report_low < cfg.report_high && cfg.report_high < cfg.t_max &&
        cfg.t_max < min_horizon)) {
    throw DomainError(fmt::format(
        "need 0 < r1 < r2 < t_max < min cell horizon; got r1={}, r2={}, t_max={}, horizon={}",
        cfg.report_low, cfg.report_high, cfg.t_max, min_horizon));
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw DomainError(fmt::format("alpha = {} not in (0, 1)", cfg.alpha));
  }
  kernel_by_name(cfg.kernel);
}

TrajectoryAnalysis analyze_trajectory(const Trajectory& traj, const ExperimentConfig& cfg,
                                      const ProcessSpec& spec) {
  const Partition p = config_partition(cfg, spec);
  const GlobalCumulative gc = global_cumulative(traj, p, spec, cfg.t_max);
  TrajectoryAnalysis a{global_rate(gc, kernel_by_name(cfg.kernel), cfg.alpha, cfg.report_low,
                                   cfg.report_high, cfg.grid_points),
                       0, {}, {}, false};
  const auto k = locate(p, cfg.center_mark);
  if (!k) throw DomainError(fmt::format("center_mark {} outside the partition", cfg.center_mark));
  a.center_cell = *k;
  a.gated = !gc.per_cell[*k].threshold_passed;
  a.cumulative_curve.grid = uniform_grid(cfg.t_max, cfg.grid_points);
  for (double s : a.cumulative_curve.grid) a.cumulative_curve.values.push_back(gc(cfg.center_mark, s));
  a.rate_curve = a.rate.curves[*k];
  return a;
}

Seed replicate_seed(Seed master, std::size_t sample_size, std::size_t replicate) {
  return derive_seed(derive_seed(master, sample_size), replicate);
}

ReplicateResult run_replicate(const ExperimentConfig& cfg, const ProcessSpec& spec,
                              std::size_t sample_size, std::size_t replicate) {
  ReplicateResult r;
  r.sample_size = sample_size;
  r.replicate = replicate;
  try {
    auto start = Clock::now();
    const Trajectory traj =
        simulate_chain(spec, cfg.z0, sample_size, replicate_seed(cfg.master_seed, sample_size, replicate));
    r.simulate_seconds = seconds_since(start);

    start = Clock::now();
    const TrajectoryAnalysis a = analyze_trajectory(traj, cfg, spec);
    const double x = cfg.center_mark;
    r.ise_cumulative = integrated_square_error(
        a.cumulative_curve, [&](double s) { return cumulative_rate(spec, x, s); }, 0.0,
        cfg.report_high);
    r.ise_rate = integrated_square_error(
        a.rate_curve, [&](double s) { return spec.jump_rate(x, s); }, cfg.report_low,
        cfg.report_high);
    r.visit_fraction = a.rate.cumulative.per_cell[a.center_cell].nu_hat;
    r.cumulative_at_report_end = a.rate.cumulative(x, cfg.report_high);

    double abs_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.rate_curve.grid.size(); ++i) {
      const double s = a.rate_curve.grid[i];
      if (s < cfg.report_low || s > cfg.report_high) continue;
      abs_sum += std::abs(a.rate_curve.values[i] - spec.jump_rate(x, s));
      ++count;
    }
    r.rate_mae = count > 0 ? abs_sum / static_cast<double>(count) : 0.0;
    r.estimate_seconds = seconds_since(start);
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  const ProcessSpec spec = model_by_name(cfg.model);
  validate_config(cfg, spec);
  const auto wall_start = Clock::now();

  struct Task {
    std::size_t size;
    std::size_t replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t n : cfg.sample_sizes) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) tasks.push_back({n, r});
  }

  ExperimentReport report;
  report.config = cfg;
  report.replicates.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      report.replicates[i] = run_replicate(cfg, spec, tasks[i].size, tasks[i].replicate);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  double visit_sum = 0.0;
  std::size_t visit_count = 0;
  for (const ReplicateResult& r : report.replicates) {
    report.simulate_seconds += r.simulate_seconds;
    report.estimate_seconds += r.estimate_seconds;
    if (!r.ok) {
      report.warnings.push_back(fmt::format("replicate {} at n={} failed and is excluded: {}",
                                            r.replicate, r.sample_size, r.error));
      continue;
    }
    visit_sum += r.visit_fraction;
    ++visit_count;
  }
  report.visit_fraction_mean = visit_count > 0 ? visit_sum / static_cast<double>(visit_count) : 0.0;

  for (std::size_t n : cfg.sample_sizes) {
    std::vector<double> ise_cum;
    std::vector<double> ise_rate;
    for (const ReplicateResult& r : report.replicates) {
      if (r.sample_size != n || !r.ok) continue;
      ise_cum.push_back(r.ise_cumulative);
      ise_rate.push_back(r.ise_rate);
    }
    if (ise_cum.empty()) {
      report.warnings.push_back(fmt::format("no successful replicate at n={}; no summary", n));
      continue;
    }
    report.summaries.push_back({n, "ISE_Lambda", boxplot_summary(std::move(ise_cum))});
    report.summaries.push_back({n, "ISE_lambda", boxplot_summary(std::move(ise_rate))});
  }
  report.wall_seconds = seconds_since(wall_start);
  return report;
}

nlohmann::json report_to_json(const ExperimentReport& report, bool include_runtimes) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  auto summaries = nlohmann::json::array();
  for (const MetricSummary& s : report.summaries) {
    summaries.push_back(summary_to_json(s.sample_size, s.metric, s.summary));
  }
  j["summaries"] = summaries;
  j["visit_fraction_mean"] = report.visit_fraction_mean;
  auto failed = nlohmann::json::array();
  for (const ReplicateResult& r : report.replicates) {
    if (!r.ok) failed.push_back({{"n", r.sample_size}, {"replicate", r.replicate}, {"error", r.error}});
  }
  j["failed_replicates"] = failed;
  j["warnings"] = report.warnings;
  j["notes"] = {{"confidence_bands", "asymptotic, unverified assumption"},
                {"ise_Lambda_window", {0.0, report.config.report_high}},
                {"ise_lambda_window", {report.config.report_low, report.config.report_high}}};
  if (include_runtimes) {
    j["runtimes"] = {{"simulate_seconds", report.simulate_seconds},
                     {"estimate_seconds", report.estimate_seconds},
                     {"wall_seconds", report.wall_seconds}};
  }
  return j;
}

void write_ise_csv(std::ostream& out, const ExperimentReport& report) {
  out << "sample_size,replicate,ise_lambda_cum,ise_lambda\n";
  for (const ReplicateResult& r : report.replicates) {
    if (!r.ok) continue;
    fmt::print(out, "{},{},{:.17g},{:.17g}\n", r.sample_size, r.replicate, r.ise_cumulative,
               r.ise_rate);
  }
}

std::vector<std::filesystem::path> simulate_command(const ExperimentConfig& cfg) {
  const ProcessSpec spec = model_by_name(cfg.model);
  if (!spec.state_space.contains(cfg.z0)) {
    throw DomainError(fmt::format("z0 = {} outside the state space", cfg.z0));
  }
  const std::filesystem::path dir(cfg.output_dir);
  ensure_directory(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t n : cfg.sample_sizes) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const Trajectory traj = simulate_chain(spec, cfg.z0, n, replicate_seed(cfg.master_seed, n, r));
      const auto path = dir / fmt::format("trajectory_n{}_r{:03}.csv", n, r);
      auto out = open_output(path);
      write_trajectory_csv(out, traj);
      finish(out, path);
      written.push_back(path);
    }
  }
  return written;
}

EstimateOutput estimate_command(const std::filesystem::path& trajectory, const ExperimentConfig& cfg) {
  const ProcessSpec spec = model_by_name(cfg.model);
  validate_config(cfg, spec);
  std::ifstream in(trajectory);
  if (!in) throw IoError(fmt::format("cannot read trajectory '{}'", trajectory.string()));
  const Trajectory traj = read_trajectory_csv(in);
  for (double z : traj.marks) {
    if (!spec.state_space.contains(z)) {
      throw DomainError(fmt::format("trajectory mark {} outside the model's state space", z));
    }
  }

  const TrajectoryAnalysis a = analyze_trajectory(traj, cfg, spec);
  EstimateOutput result;
  CumulativeEstimate ce = a.rate.cumulative.per_cell[a.center_cell];
  if (a.gated) {
    result.warnings.push_back(fmt::format(
        "cell containing {} has empirical measure {} <= 1/sqrt(n); estimates set to zero",
        cfg.center_mark, ce.nu_hat));
    ce.lhat = StepFunction();
    ce.variance = StepFunction();
  }

  const std::filesystem::path dir(cfg.output_dir);
  ensure_directory(dir);
  const std::string stem = trajectory.stem().string();
  const auto cum_path = dir / (stem + "_cumulative.csv");
  auto cum = open_output(cum_path);
  write_estimate_csv(cum, ce, cfg.grid_points, 0.95);
  finish(cum, cum_path);

  const auto rate_path = dir / (stem + "_rate.csv");
  auto rate = open_output(rate_path);
  write_rate_csv(rate, a.rate_curve, cfg.report_low, cfg.report_high);
  finish(rate, rate_path);

  result.files = {cum_path, rate_path};
  return result;
}

ExperimentOutput experiment_command(const ExperimentConfig& cfg, std::size_t jobs) {
  ExperimentOutput result{run_experiment(cfg, jobs), {}};
  const ExperimentReport& report = result.report;
  const std::filesystem::path dir(cfg.output_dir);
  ensure_directory(dir);

  const auto report_path = dir / "report.json";
  auto rep = open_output(report_path);
  rep << report_to_json(report).dump(2) << '\n';
  finish(rep, report_path);

  const auto ise_path = dir / "ise.csv";
  auto ise = open_output(ise_path);
  write_ise_csv(ise, report);
  finish(ise, ise_path);
  result.files = {report_path, ise_path};

  // Estimated vs exact curves of the first successful replicate at the
  // largest sample size, for a side-by-side plot.
  const std::size_t n_max = *std::max_element(cfg.sample_sizes.begin(), cfg.sample_sizes.end());
  const auto first_ok = std::find_if(report.replicates.begin(), report.replicates.end(),
                                     [&](const ReplicateResult& r) { return r.ok && r.sample_size == n_max; });
  if (first_ok != report.replicates.end()) {
    const ProcessSpec spec = model_by_name(cfg.model);
    const Trajectory traj = simulate_chain(spec, cfg.z0, n_max,
                                           replicate_seed(cfg.master_seed, n_max, first_ok->replicate));
    const TrajectoryAnalysis a = analyze_trajectory(traj, cfg, spec);
    const auto curves_path = dir / "curves.csv";
    auto curves = open_output(curves_path);
    curves << "time,cumulative_estimate,cumulative_exact,rate_estimate,rate_exact,flag_edge\n";
    for (std::size_t i = 0; i < a.cumulative_curve.grid.size(); ++i) {
      const double s = a.cumulative_curve.grid[i];
      const bool edge = s < cfg.report_low || s > cfg.report_high;
      fmt::print(curves, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", s,
                 a.cumulative_curve.values[i], cumulative_rate(spec, cfg.center_mark, s),
                 a.rate_curve.values[i], spec.jump_rate(cfg.center_mark, s), edge ? 1 : 0);
    }
    finish(curves, curves_path);
    result.files.push_back(curves_path);
  }
  return result;
}

}  // namespace mrp
