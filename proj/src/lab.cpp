#include "dephase/lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "dephase/analytic_dephasing.hpp"
#include "dephase/analytic_protection.hpp"
#include "dephase/errors.hpp"
#include "dephase/exact_splitting.hpp"
#include "dephase/oracles.hpp"

namespace dephase::lab {
namespace {

struct SolverName {
  Solver solver;
  std::string_view name;
};

constexpr SolverName kSolvers[] = {
    {Solver::MeasurementOnlyZ, "measurement-only-z"},
    {Solver::MeasurementOnlyX, "measurement-only-x"},
    {Solver::AnalyticZ, "analytic-z"},
    {Solver::AnalyticX, "analytic-x"},
    {Solver::Exact, "exact"},
    {Solver::OdeOracleZ, "ode-oracle-z"},
    {Solver::IdeOracleX, "ide-oracle-x"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "inf" || v == "infinity" || v == "Inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    fail(ErrorKind::Config, "invalid number for '" + std::string(key) + "': '" + std::string(v) + "'");
  return out;
}

int parse_int(std::string_view key, std::string_view v) {
  v = trim(v);
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    fail(ErrorKind::Config, "invalid integer for '" + std::string(key) + "': '" + std::string(v) + "'");
  return out;
}

std::string format_basis_opt(const std::optional<Basis>& b) { return b ? std::string(to_string(*b)) : "natural"; }

DensityMatrix2 assemble_z(double rho11, cplx rho12) { return DensityMatrix2::from_elements(rho11, rho12, Basis::Z); }

double sigma_x_population(const DensityMatrix2& rho0, double lambda_sq, double t) {
  return 0.5 + (2.0 * rho0.rho11() - 1.0) / 2.0 * std::exp(-2.0 * lambda_sq * t);
}

std::vector<DensityMatrix2> solve(const RunConfig& cfg, const std::vector<double>& grid) {
  const DensityMatrix2 rho0 = initial_state_z(cfg);
  const ModelParams& p = cfg.params;
  std::vector<DensityMatrix2> out;
  out.reserve(grid.size());
  switch (cfg.solver) {
    case Solver::MeasurementOnlyZ:
      for (double t : grid) out.push_back(measurement_only_z(rho0, p.lambda_sq, p.omega0, t));
      break;
    case Solver::MeasurementOnlyX:
      for (double t : grid) out.push_back(evolve_x_measurement_only(rho0, p.lambda_sq, p.omega0, t, Basis::X));
      break;
    case Solver::AnalyticZ:
      for (double t : grid) out.push_back(evolve_z(rho0, p, t));
      break;
    case Solver::AnalyticX:
      for (double t : grid) out.push_back(evolve_x_zero_T(rho0, p, t));
      break;
    case Solver::Exact: {
      if (!p.zero_temperature() || p.omega0 != 0.0)
        fail(ErrorKind::UnsupportedRegime, "exact solver requires beta = inf and omega0 = 0");
      if (cfg.n_steps > cfg.max_steps)
        fail(ErrorKind::Resource, "exact solver: n_steps = " + std::to_string(cfg.n_steps) + " exceeds max_steps = " +
                                      std::to_string(cfg.max_steps) +
                                      "; cost grows as 2^N N, so study convergence at smaller N (sweep --axis n_steps)");
      const int intervals = sample_count(cfg) - 1;
      const int per_sample = cfg.n_steps / intervals;
      const double dt = cfg.t_max / static_cast<double>(cfg.n_steps);
      const CoherencePair pair0{rho0.rho12(), rho0.rho21()};
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k == 0) {
          out.push_back(change_basis(rho0, Basis::X));
          continue;
        }
        SplittingPlan plan;
        plan.n_steps = static_cast<int>(k) * per_sample;
        plan.dt = dt;
        plan.eta = p.eta;
        plan.lambda_sq = p.lambda_sq;
        plan.max_steps = cfg.max_steps;
        plan.threads = cfg.threads;
        const CoherencePair pair = propagate_exact(pair0, plan);
        out.push_back(population_x_from_pair(pair, rho0.rho11(), p.lambda_sq, grid[k]));
      }
      break;
    }
    case Solver::OdeOracleZ: {
      const auto c = oracles::ode_coherence_z(p, grid, rho0.rho12());
      for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(assemble_z(rho0.rho11(), c[k]));
      break;
    }
    case Solver::IdeOracleX: {
      const auto c = oracles::ide_coherence_x(p, grid, rho0.rho12());
      for (std::size_t k = 0; k < grid.size(); ++k)
        out.push_back(change_basis(assemble_z(sigma_x_population(rho0, p.lambda_sq, grid[k]), c[k]), Basis::X));
      break;
    }
  }
  const Basis target = cfg.output_basis.value_or(natural_basis(cfg.solver));
  for (auto& r : out) r = change_basis(r, target);
  return out;
}

std::vector<std::string> config_meta(const RunConfig& cfg, std::string_view prefix) {
  std::vector<std::string> lines;
  for (const auto& [k, v] : echo(cfg)) lines.push_back(std::string(prefix) + k + "=" + v);
  return lines;
}

double max_row_diff(const Sample& a, const Sample& b) {
  return std::max({std::abs(a.rho.rho11() - b.rho.rho11()), std::abs(a.rho.rho22() - b.rho.rho22()),
                   std::abs(a.rho.rho12().real() - b.rho.rho12().real()),
                   std::abs(a.rho.rho12().imag() - b.rho.rho12().imag())});
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string_view to_string(Solver s) {
  for (const auto& e : kSolvers)
    if (e.solver == s) return e.name;
  return "unknown";
}

Solver parse_solver(std::string_view s) {
  s = trim(s);
  for (const auto& e : kSolvers)
    if (e.name == s) return e.solver;
  fail(ErrorKind::Config, "unknown solver '" + std::string(s) + "'");
}

Basis natural_basis(Solver s) {
  switch (s) {
    case Solver::MeasurementOnlyZ:
    case Solver::AnalyticZ:
    case Solver::OdeOracleZ:
      return Basis::Z;
    default:
      return Basis::X;
  }
}

void set_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "solver") cfg.solver = parse_solver(value);
  else if (key == "lambda_sq") cfg.params.lambda_sq = parse_double(key, value);
  else if (key == "omega0") cfg.params.omega0 = parse_double(key, value);
  else if (key == "eta") cfg.params.eta = parse_double(key, value);
  else if (key == "beta") cfg.params.beta = parse_double(key, value);
  else if (key == "rho11") cfg.initial.rho11 = parse_double(key, value);
  else if (key == "rho12_re") cfg.initial.rho12_re = parse_double(key, value);
  else if (key == "rho12_im") cfg.initial.rho12_im = parse_double(key, value);
  else if (key == "initial_basis") cfg.initial.basis = parse_basis(value);
  else if (key == "t_max") cfg.t_max = parse_double(key, value);
  else if (key == "samples") {
    if (value == "auto") cfg.samples.reset();
    else cfg.samples = parse_int(key, value);
  } else if (key == "n_steps") cfg.n_steps = parse_int(key, value);
  else if (key == "max_steps") cfg.max_steps = parse_int(key, value);
  else if (key == "output_basis") {
    if (value == "natural") cfg.output_basis.reset();
    else cfg.output_basis = parse_basis(value);
  } else fail(ErrorKind::Config, "unknown configuration key '" + std::string(key) + "'");
}

void apply_override(RunConfig& cfg, std::string_view key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string_view::npos)
    fail(ErrorKind::Config, "override must look like key=value, got '" + std::string(key_value) + "'");
  set_key(cfg, key_value.substr(0, eq), key_value.substr(eq + 1));
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  const bool from_csv = text.rfind("# dephase-lab", 0) == 0;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (from_csv) {
      if (line.empty() || line[0] != '#') break;
      line = trim(line.substr(1));
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(line.substr(0, eq));
      if (key.find('.') != std::string_view::npos || key == "version" || key == "note") continue;
      set_key(cfg, key, line.substr(eq + 1));
      continue;
    }
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key=value");
    set_key(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<std::string, std::string>> echo(const RunConfig& cfg) {
  return {
      {"solver", std::string(to_string(cfg.solver))},
      {"lambda_sq", format_double(cfg.params.lambda_sq)},
      {"omega0", format_double(cfg.params.omega0)},
      {"eta", format_double(cfg.params.eta)},
      {"beta", format_double(cfg.params.beta)},
      {"rho11", format_double(cfg.initial.rho11)},
      {"rho12_re", format_double(cfg.initial.rho12_re)},
      {"rho12_im", format_double(cfg.initial.rho12_im)},
      {"initial_basis", std::string(to_string(cfg.initial.basis))},
      {"t_max", format_double(cfg.t_max)},
      {"samples", std::to_string(sample_count(cfg))},
      {"n_steps", std::to_string(cfg.n_steps)},
      {"max_steps", std::to_string(cfg.max_steps)},
      {"output_basis", format_basis_opt(cfg.output_basis)},
  };
}

int sample_count(const RunConfig& cfg) {
  if (cfg.samples) return *cfg.samples;
  return cfg.solver == Solver::Exact ? cfg.n_steps + 1 : 101;
}

void validate(const RunConfig& cfg) {
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) fail(ErrorKind::Config, "t_max must be finite and > 0");
  const int n = sample_count(cfg);
  if (n < 2) fail(ErrorKind::Config, "samples must be >= 2");
  if (cfg.solver == Solver::Exact) {
    if (cfg.n_steps < 1) fail(ErrorKind::Config, "n_steps must be >= 1");
    if (cfg.n_steps % (n - 1) != 0)
      fail(ErrorKind::Config, "exact solver: samples - 1 must divide n_steps so every sample sits on a step");
  }
  const Validity v = check_state(initial_state_z(cfg));
  if (!v.ok(1e-12)) fail(ErrorKind::Config, "initial state is not a valid density matrix");
}

std::vector<double> time_grid(const RunConfig& cfg) {
  const int n = sample_count(cfg);
  std::vector<double> g(static_cast<std::size_t>(n));
  if (cfg.solver == Solver::Exact) {
    // Equal fractions round to equal doubles, so this grid matches the uniform one bit for bit.
    const int per_sample = cfg.n_steps / (n - 1);
    for (int k = 0; k < n; ++k)
      g[k] = cfg.t_max * (static_cast<double>(k * per_sample) / static_cast<double>(cfg.n_steps));
  } else {
    for (int k = 0; k < n; ++k) g[k] = cfg.t_max * (static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return g;
}

DensityMatrix2 initial_state_z(const RunConfig& cfg) {
  const DensityMatrix2 r =
      DensityMatrix2::from_elements(cfg.initial.rho11, cplx(cfg.initial.rho12_re, cfg.initial.rho12_im), cfg.initial.basis);
  return change_basis(r, Basis::Z);
}

TimeSeries run(const RunConfig& cfg) {
  validate(cfg);
  TimeSeries ts;
  ts.config = cfg;
  const auto grid = time_grid(cfg);
  const auto states = solve(cfg, grid);
  ts.rows.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) ts.rows.push_back({grid[k], states[k]});
  return ts;
}

std::string to_csv(const TimeSeries& ts, const std::vector<std::string>& extra_meta) {
  std::string s = "# dephase-lab time series\n";
  s += "# version=" + std::string(kVersion) + "\n";
  for (const auto& line : config_meta(ts.config, "")) s += "# " + line + "\n";
  for (const auto& line : extra_meta) s += "# " + line + "\n";
  s += "t,rho11,rho22,rho12_re,rho12_im,basis\n";
  for (const auto& r : ts.rows) {
    s += format_double(r.t) + ',' + format_double(r.rho.rho11()) + ',' + format_double(r.rho.rho22()) + ',' +
         format_double(r.rho.rho12().real()) + ',' + format_double(r.rho.rho12().imag()) + ',' +
         std::string(to_string(r.rho.basis)) + '\n';
  }
  return s;
}

Comparison compare(const RunConfig& a, const RunConfig& b, std::optional<double> tolerance) {
  const DensityMatrix2 ia = initial_state_z(a), ib = initial_state_z(b);
  if (ia.m != ib.m) fail(ErrorKind::Config, "compare: initial states differ");
  if (time_grid(a) != time_grid(b)) fail(ErrorKind::Config, "compare: time grids differ");
  Comparison c;
  c.a = run(a);
  c.b = run(b);
  c.tolerance = tolerance;
  const Basis target = c.a.rows.front().rho.basis;
  for (auto& r : c.b.rows) r.rho = change_basis(r.rho, target);
  for (std::size_t k = 0; k < c.a.rows.size(); ++k) {
    const auto& x = c.a.rows[k].rho;
    const auto& y = c.b.rows[k].rho;
    ComparisonRow row;
    row.t = c.a.rows[k].t;
    row.d_rho11 = std::abs(x.rho11() - y.rho11());
    row.d_rho22 = std::abs(x.rho22() - y.rho22());
    row.d_rho12_re = std::abs(x.rho12().real() - y.rho12().real());
    row.d_rho12_im = std::abs(x.rho12().imag() - y.rho12().imag());
    c.max_abs_diff_rho11 = std::max(c.max_abs_diff_rho11, row.d_rho11);
    c.max_abs_diff = std::max({c.max_abs_diff, row.d_rho11, row.d_rho22, row.d_rho12_re, row.d_rho12_im});
    c.rows.push_back(row);
  }
  c.epsilon_a = error_epsilon(c.a.rows.front().rho, c.a.rows.back().rho);
  c.epsilon_b = error_epsilon(c.b.rows.front().rho, c.b.rows.back().rho);
  c.pass = !tolerance || c.max_abs_diff_rho11 <= *tolerance;
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::string s = "# dephase-lab comparison\n";
  s += "# version=" + std::string(kVersion) + "\n";
  for (const auto& line : config_meta(c.a.config, "a.")) s += "# " + line + "\n";
  for (const auto& line : config_meta(c.b.config, "b.")) s += "# " + line + "\n";
  s += "# basis=" + std::string(to_string(c.a.rows.front().rho.basis)) + "\n";
  s += "t,abs_diff_rho11,abs_diff_rho22,abs_diff_rho12_re,abs_diff_rho12_im\n";
  for (const auto& r : c.rows)
    s += format_double(r.t) + ',' + format_double(r.d_rho11) + ',' + format_double(r.d_rho22) + ',' +
         format_double(r.d_rho12_re) + ',' + format_double(r.d_rho12_im) + '\n';
  return s;
}

std::string comparison_json(const Comparison& c, double wall_time_s) {
  nlohmann::json j;
  j["solver_a"] = to_string(c.a.config.solver);
  j["solver_b"] = to_string(c.b.config.solver);
  j["basis"] = to_string(c.a.rows.front().rho.basis);
  j["rows"] = c.rows.size();
  j["max_abs_diff_rho11"] = number_or_null(c.max_abs_diff_rho11);
  j["max_abs_diff"] = number_or_null(c.max_abs_diff);
  j["epsilon_a"] = number_or_null(c.epsilon_a);
  j["epsilon_b"] = number_or_null(c.epsilon_b);
  j["tolerance"] = c.tolerance ? nlohmann::json(*c.tolerance) : nlohmann::json(nullptr);
  j["pass"] = c.pass;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

SweepAxis parse_axis(std::string_view s) {
  s = trim(s);
  if (s == "eta") return SweepAxis::Eta;
  if (s == "lambda_sq") return SweepAxis::LambdaSq;
  if (s == "n_steps") return SweepAxis::NSteps;
  fail(ErrorKind::Config, "unknown sweep axis '" + std::string(s) + "' (eta, lambda_sq, n_steps)");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Eta: return "eta";
    case SweepAxis::LambdaSq: return "lambda_sq";
    case SweepAxis::NSteps: return "n_steps";
  }
  return "unknown";
}

std::vector<double> default_sweep_values(SweepAxis a) {
  switch (a) {
    case SweepAxis::Eta: return {0.005, 0.01, 0.05, 0.1};
    case SweepAxis::LambdaSq: return {0.0, 1.0, 4.0, 8.0};
    case SweepAxis::NSteps: return {8.0, 12.0, 16.0, 20.0};
  }
  return {};
}

Sweep sweep(const RunConfig& base, SweepAxis axis, std::vector<double> values, bool defaulted) {
  if (values.empty()) fail(ErrorKind::Config, "sweep: no values given");
  std::sort(values.begin(), values.end());
  Sweep s;
  s.axis = axis;
  s.defaulted_values = defaulted;
  for (double v : values) {
    RunConfig cfg = base;
    switch (axis) {
      case SweepAxis::Eta: cfg.params.eta = v; break;
      case SweepAxis::LambdaSq: cfg.params.lambda_sq = v; break;
      case SweepAxis::NSteps:
        if (v != std::floor(v) || v < 1.0) fail(ErrorKind::Config, "sweep: n_steps values must be positive integers");
        cfg.n_steps = static_cast<int>(v);
        break;
    }
    SweepEntry e;
    e.value = v;
    e.series = run(cfg);
    e.final_epsilon = error_epsilon(e.series.rows.front().rho, e.series.rows.back().rho);
    e.final_abs_rho12_z = std::abs(change_basis(e.series.rows.back().rho, Basis::Z).rho12());
    if (!s.entries.empty()) e.successive_max_diff = max_row_diff(s.entries.back().series.rows.back(), e.series.rows.back());
    s.entries.push_back(std::move(e));
  }
  return s;
}

std::string sweep_file_name(const Sweep& s, std::size_t index) {
  return std::string(to_string(s.axis)) + "_" + std::to_string(index) + ".csv";
}

std::string sweep_json(const Sweep& s, double wall_time_s) {
  nlohmann::json j;
  j["axis"] = to_string(s.axis);
  j["solver"] = s.entries.empty() ? "" : std::string(to_string(s.entries.front().series.config.solver));
  j["values_source"] = s.defaulted_values ? "default grid chosen for this tool"
                                          : "user supplied";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    nlohmann::json r;
    r["value"] = e.value;
    r["file"] = sweep_file_name(s, i);
    r["final_t"] = e.series.rows.back().t;
    r["final_epsilon"] = number_or_null(e.final_epsilon);
    r["final_abs_rho12_z"] = number_or_null(e.final_abs_rho12_z);
    r["successive_max_diff"] = e.successive_max_diff ? number_or_null(*e.successive_max_diff) : nlohmann::json(nullptr);
    rows.push_back(r);
  }
  j["entries"] = rows;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

}  // namespace dephase::lab
