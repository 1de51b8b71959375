#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dephase/qstate.hpp"

namespace dephase::lab {

inline constexpr std::string_view kVersion = "1.0.0";

enum class Solver { MeasurementOnlyZ, MeasurementOnlyX, AnalyticZ, AnalyticX, Exact, OdeOracleZ, IdeOracleX };

std::string_view to_string(Solver s);
Solver parse_solver(std::string_view s);
Basis natural_basis(Solver s);

struct InitialState {
  double rho11 = 0.5;
  double rho12_re = 0.35355339059327373;   // (|1> + e^{i pi/4}|2>)/sqrt2
  double rho12_im = -0.35355339059327373;
  Basis basis = Basis::Z;
};

struct RunConfig {
  Solver solver = Solver::AnalyticZ;
  ModelParams params;
  InitialState initial;
  double t_max = 2.0;
  std::optional<int> samples;  // default 101, or n_steps + 1 for the exact solver
  int n_steps = 20;            // exact solver: steps to reach t_max
  int max_steps = 26;
  std::optional<Basis> output_basis;
  unsigned threads = 0;        // exact solver workers; not echoed, results do not depend on it
};

// Flat key=value text; '#' starts a comment. A CSV written by this tool is accepted as well:
// its metadata header reproduces the run.
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

// "key=value"; unknown keys and malformed values throw Config.
void apply_override(RunConfig& cfg, std::string_view key_value);
void set_key(RunConfig& cfg, std::string_view key, std::string_view value);

// Canonical (key, value) listing of every configuration key.
std::vector<std::pair<std::string, std::string>> echo(const RunConfig& cfg);

void validate(const RunConfig& cfg);
int sample_count(const RunConfig& cfg);
std::vector<double> time_grid(const RunConfig& cfg);
DensityMatrix2 initial_state_z(const RunConfig& cfg);

struct Sample {
  double t = 0.0;
  DensityMatrix2 rho;
};

struct TimeSeries {
  RunConfig config;
  std::vector<Sample> rows;
};

TimeSeries run(const RunConfig& cfg);

// Shortest-exact rendering with 17 significant digits.
std::string format_double(double v);

std::string to_csv(const TimeSeries& ts, const std::vector<std::string>& extra_meta = {});

struct ComparisonRow {
  double t = 0.0;
  double d_rho11 = 0.0;
  double d_rho22 = 0.0;
  double d_rho12_re = 0.0;
  double d_rho12_im = 0.0;
};

struct Comparison {
  TimeSeries a;
  TimeSeries b;
  std::vector<ComparisonRow> rows;
  double max_abs_diff_rho11 = 0.0;
  double max_abs_diff = 0.0;
  double epsilon_a = 0.0;
  double epsilon_b = 0.0;
  std::optional<double> tolerance;
  bool pass = true;
};

Comparison compare(const RunConfig& a, const RunConfig& b, std::optional<double> tolerance = std::nullopt);
std::string comparison_csv(const Comparison& c);
std::string comparison_json(const Comparison& c, double wall_time_s);

enum class SweepAxis { Eta, LambdaSq, NSteps };

SweepAxis parse_axis(std::string_view s);
std::string_view to_string(SweepAxis a);
std::vector<double> default_sweep_values(SweepAxis a);

struct SweepEntry {
  double value = 0.0;
  TimeSeries series;
  double final_epsilon = 0.0;     // in the series' output basis
  double final_abs_rho12_z = 0.0;
  std::optional<double> successive_max_diff;  // vs the previous entry's final row
};

struct Sweep {
  SweepAxis axis = SweepAxis::Eta;
  bool defaulted_values = false;
  std::vector<SweepEntry> entries;  // ascending axis value
};

Sweep sweep(const RunConfig& base, SweepAxis axis, std::vector<double> values, bool defaulted = false);
std::string sweep_json(const Sweep& s, double wall_time_s);
std::string sweep_file_name(const Sweep& s, std::size_t index);

}  // namespace dephase::lab
