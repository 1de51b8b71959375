#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dephase/errors.hpp"
#include "dephase/lab.hpp"

namespace {

using dephase::ErrorKind;
namespace lab = dephase::lab;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::UnsupportedRegime:
    case ErrorKind::Resource:
      return 3;
    case ErrorKind::Numerical:
      return 4;
  }
  return 1;
}

unsigned threads_from_env() {
  const char* v = std::getenv("DEPHASE_LAB_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) dephase::fail(ErrorKind::Config, "DEPHASE_LAB_THREADS must be a non-negative integer");
  return static_cast<unsigned>(n);
}

lab::RunConfig build_config(const std::string& path, const std::vector<std::string>& overrides) {
  lab::RunConfig cfg = path.empty() ? lab::RunConfig{} : lab::load_config(path);
  for (const auto& kv : overrides) lab::apply_override(cfg, kv);
  cfg.threads = threads_from_env();
  return cfg;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) dephase::fail(ErrorKind::Config, "cannot write '" + path + "'");
  out << data;
  if (!out) dephase::fail(ErrorKind::Config, "write failed for '" + path + "'");
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") std::cout << data;
  else write_file(path, data);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    lab::RunConfig probe;
    lab::set_key(probe, "t_max", item);  // reuses strict number parsing
    out.push_back(probe.t_max);
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level system under finite-time measurement with Ohmic phase noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lab::kVersion));

  std::string run_config, run_out, run_json;
  std::vector<std::string> run_sets;
  auto* run_cmd = app.add_subcommand("run", "Integrate one configuration and write its time series as CSV");
  run_cmd->add_option("--config", run_config, "key=value file, or a CSV previously written by this tool");
  run_cmd->add_option("--set", run_sets, "override, key=value (repeatable; wins over --config)");
  run_cmd->add_option("--out", run_out, "CSV output path ('-' or omitted: stdout)");
  run_cmd->add_option("--json", run_json, "optional JSON summary path (includes wall time)");

  std::vector<std::string> cmp_configs, cmp_sets_a, cmp_sets_b;
  std::string cmp_out, cmp_json;
  std::optional<double> cmp_tol;
  auto* cmp_cmd = app.add_subcommand("compare", "Run two configurations on one grid and report differences");
  cmp_cmd->add_option("--config", cmp_configs, "two config files, a then b")->expected(2)->required();
  cmp_cmd->add_option("--set", cmp_sets_a, "override applied to both runs");
  cmp_cmd->add_option("--set-b", cmp_sets_b, "override applied to run b only");
  cmp_cmd->add_option("--tol", cmp_tol, "pass/fail tolerance on max |d rho11|");
  cmp_cmd->add_option("--out", cmp_out, "per-row difference CSV path");
  cmp_cmd->add_option("--json", cmp_json, "JSON summary path ('-' or omitted: stdout)");

  std::string sw_config, sw_axis, sw_out;
  std::optional<std::string> sw_values;
  std::vector<std::string> sw_sets;
  auto* sw_cmd = app.add_subcommand("sweep", "Run one configuration per axis value");
  sw_cmd->add_option("--config", sw_config, "base config file");
  sw_cmd->add_option("--set", sw_sets, "override, key=value (repeatable)");
  sw_cmd->add_option("--axis", sw_axis, "eta | lambda_sq | n_steps")->required();
  sw_cmd->add_option("--values", sw_values, "comma-separated values (default: built-in grid, labeled as such)");
  sw_cmd->add_option("--out", sw_out, "output directory for one CSV per value plus summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors are configuration errors; --help and --version exit 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (*run_cmd) {
      const auto cfg = build_config(run_config, run_sets);
      const auto ts = lab::run(cfg);
      emit(run_out, lab::to_csv(ts));
      if (!run_json.empty()) {
        std::string j = "{\n  \"solver\": \"" + std::string(lab::to_string(cfg.solver)) + "\",\n  \"rows\": " +
                        std::to_string(ts.rows.size()) + ",\n  \"wall_time_s\": " + lab::format_double(seconds_since(t0)) +
                        "\n}\n";
        emit(run_json, j);
      }
      return 0;
    }
    if (*cmp_cmd) {
      auto a = build_config(cmp_configs[0], cmp_sets_a);
      auto sets_b = cmp_sets_a;
      sets_b.insert(sets_b.end(), cmp_sets_b.begin(), cmp_sets_b.end());
      auto b = build_config(cmp_configs[1], sets_b);
      const auto c = lab::compare(a, b, cmp_tol);
      if (!cmp_out.empty()) write_file(cmp_out, lab::comparison_csv(c));
      emit(cmp_json, lab::comparison_json(c, seconds_since(t0)));
      return c.pass ? 0 : 1;
    }
    if (*sw_cmd) {
      const auto base = build_config(sw_config, sw_sets);
      const auto axis = lab::parse_axis(sw_axis);
      const bool defaulted = !sw_values.has_value();
      const auto values = defaulted ? lab::default_sweep_values(axis) : parse_values(*sw_values);
      const auto s = lab::sweep(base, axis, values, defaulted);
      std::filesystem::create_directories(sw_out);
      const std::filesystem::path dir(sw_out);
      for (std::size_t i = 0; i < s.entries.size(); ++i) {
        std::vector<std::string> meta{"sweep.axis=" + std::string(lab::to_string(axis)),
                                      "sweep.value=" + lab::format_double(s.entries[i].value)};
        if (defaulted) meta.push_back("sweep.values_source=default grid chosen for this tool");
        write_file((dir / lab::sweep_file_name(s, i)).string(), lab::to_csv(s.entries[i].series, meta));
      }
      const auto summary = lab::sweep_json(s, seconds_since(t0));
      write_file((dir / "summary.json").string(), summary);
      std::cout << summary;
      return 0;
    }
  } catch (const dephase::Error& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "dephase-lab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
