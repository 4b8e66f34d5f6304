#pragma once

#include "drcp/cutting_surface.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drcp {

class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { CuttingSurface, Dpg };

struct RunConfig {
  std::string name = "run";
  std::string instance = "section5";
  RunMode mode = RunMode::CuttingSurface;
  // Empty means the built-in schedule for the instance.
  std::vector<std::vector<Edge>> schedule;
  int s = 0;           // UJSC window; 0 picks the built-in value
  std::string d = "auto";  // "auto", "m-1" or a positive integer
  std::vector<double> eps0{100.0};
  double r = 10.0;
  std::vector<std::vector<double>> y0;
  double eps1 = 1e-2;
  double eps2 = 1e-6;
  double eps3 = 1e-6;
  double eps4 = 0.1;
  double eps5 = 0.1;
  double eps6 = 0.1;
  double alpha0 = 1.0;
  std::int64_t t_cap = 100000;
  int outer_cap = 200;
  std::string output_dir = "out";
  std::uint64_t seed = 0;  // reserved
  int grid_n = 2001;
  double refine_tol = 1e-10;
  double dedupe_tol = 1e-12;
  double projection_tol = 1e-10;
  int max_sweeps = 10000;
  std::int64_t trace_stride = 1;  // DPG mode: write every k-th slot
};

/// Parses JSON text. Missing fields keep their defaults.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ValidationError naming the offending field; returns precision warnings.
std::vector<std::string> validate_config(const RunConfig& cfg);

/// Everything a run needs, resolved from a validated config.
struct ResolvedRun {
  ProblemInstance inst;
  GraphSchedule sched;
  CuttingSurfaceConfig cutting;
};

ResolvedRun resolve(const RunConfig& cfg);

/// Names accepted by preset_configs.
const std::vector<std::string>& preset_names();

/// Configs making up a preset, derived from `base` (defaults when omitted).
std::vector<RunConfig> preset_configs(std::string_view name, const RunConfig& base = {});

/// argmin F over the intersection of X and every cut constraint
/// g_i(x, y) <= -eps_i, by projected gradient until |dx| < 1e-10.
Vec centralized_oracle(const ProblemInstance& inst, std::span<const double> eps,
                       std::span<const std::vector<double>> cuts);

/// "%.17g"; inf and nan spelled "inf", "-inf", "nan".
std::string format_double(double v);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Static SVG line chart; non-finite points (and non-positive ones on log axes) are skipped.
std::string render_svg(const ChartSpec& spec, const std::vector<Series>& series);

struct ExecutionResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::optional<RunReport> report;   // cutting-surface runs
  std::optional<DpgOutcome> outcome; // DPG runs
};

/// Runs one config and writes CSV/SVG files under `out_dir`. Propagates
/// IterationCapExceeded after writing what the partial report allows.
ExecutionResult execute(const RunConfig& cfg, const std::filesystem::path& out_dir, bool quiet = true);

/// Runs every config of a preset into `out_dir`; sweeps also get sweep.csv and sweep.svg.
/// Sweep members that exceed the iteration cap are recorded, not rethrown.
std::vector<ExecutionResult> execute_preset(std::string_view name, const RunConfig& base,
                                            const std::filesystem::path& out_dir, bool quiet = true);

}  // namespace drcp
