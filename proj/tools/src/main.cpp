#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pedflow/analysis.hpp"
#include "pedflow/cli/config.hpp"
#include "pedflow/cli/scenario.hpp"
#include "pedflow/cli/tables.hpp"
#include "pedflow/errors.hpp"

namespace fs = std::filesystem;
using namespace pedflow;
using namespace pedflow::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheck = 4;

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario config file (key = value)");
  cmd->add_option("--preset", args.preset, "named preset: fig3, fig4, fig5, fig5-unstable");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--set", args.overrides, "extra `key=value` entries, applied last");
}

Config load_config(const CommonArgs& args) {
  Config cfg;
  if (!args.preset.empty()) cfg = preset_config(args.preset);
  if (!args.config_path.empty()) cfg = merge(cfg, Config::load(args.config_path));
  std::string extra;
  for (const auto& kv : args.overrides) extra += kv + "\n";
  if (!extra.empty()) cfg = merge(cfg, Config::parse(extra, "--set"));
  return cfg;
}

fs::path output_dir(const CommonArgs& args, const Config& cfg) {
  if (!args.out.empty()) return args.out;
  if (cfg.has("output.dir")) return cfg.get_string("output.dir");
  throw ConfigError("an output directory is required (--out or output.dir)");
}

std::ofstream open_file(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

int cmd_simulate(const CommonArgs& args, bool check) {
  const Config cfg = load_config(args);
  ScenarioConfig scenario = scenario_from_config(cfg);
  const fs::path out = output_dir(args, cfg);
  const ScenarioResult result = run_scenario(scenario);
  write_artifacts(scenario, result, out);

  std::cout << "scenario " << scenario.name << ": " << result.steps << " steps, max CFL "
            << result.max_cfl << ", final clusters " << result.clusters.back().set.count()
            << ", final deviation " << result.final_deviation << ", mass drift "
            << result.worst_relative_drift << '\n';
  if (!check) return 0;
  const auto checks = evaluate_checks(scenario, result);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  if (checks.empty()) std::cout << "no checks configured\n";
  return ok ? 0 : kExitCheck;
}

int cmd_map(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const ModelSpec model = model_from_config(cfg);
  const auto resolution = cfg.get_int("map.resolution", 200);
  if (resolution < 2) throw ConfigError("`map.resolution` must be at least 2");
  const fs::path out = output_dir(args, cfg);
  const HyperbolicityMap map = hyperbolicity_map(model, static_cast<std::size_t>(resolution));
  const auto boundary = hyperbolicity_boundary(model, map);
  auto os = open_file(out / "hyperbolicity_map.csv");
  emit_hyperbolicity_map(os, map);
  auto bs = open_file(out / "hyperbolicity_boundary.csv");
  emit_boundary(bs, boundary);
  std::cout << "map " << resolution << "x" << resolution << ", " << boundary.size()
            << " boundary points\n";
  return 0;
}

int cmd_dispersion(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const ModelSpec model = model_from_config(cfg);
  const double rp = cfg.get_double("initial.rho_plus", 0.5);
  const double rm = cfg.get_double("initial.rho_minus", 0.3);
  const double delta_diff = cfg.get_double("scheme.delta", 0.4);
  const TildeSpeeds speeds = diffusive_speeds(model, rp, rm);
  const double band = delta_diff > 0.0 && speeds.discriminant() < 0.0
                          ? std::sqrt(-speeds.discriminant()) / (2.0 * delta_diff)
                          : 1.0;
  const double xi_min = cfg.get_double("analysis.xi_min", 0.0);
  const double xi_max = cfg.get_double("analysis.xi_max", 2.0 * band);
  const auto count = cfg.get_int("analysis.xi_count", 401);
  if (count < 1) throw ConfigError("`analysis.xi_count` must be positive");
  const fs::path out = output_dir(args, cfg);
  auto os = open_file(out / "dispersion.csv");
  emit_dispersion_table(os, model, rp, rm, delta_diff,
                        xi_grid(xi_min, xi_max, static_cast<std::size_t>(count)));
  std::cout << "dispersion at (" << rp << ", " << rm << "), Delta = " << speeds.discriminant()
            << '\n';
  return 0;
}

int cmd_pressure(const CommonArgs& args) {
  const Config cfg = load_config(args);
  const PressureParams params(cfg.get_double("pressure.M", 0.5), cfg.get_double("pressure.m", 2.0),
                              cfg.get_double("pressure.eps", 1e-2),
                              cfg.get_double("pressure.gamma", 2.0),
                              cfg.get_double("pressure.rho_star", 1.0), PressureContext::OneWay);
  const double rho_min = cfg.get_double("table.rho_min", 0.0);
  const double rho_max = cfg.get_double("table.rho_max", params.rho_star() * (1.0 - 1e-3));
  const auto count = cfg.get_int("table.count", 200);
  if (count < 2) throw ConfigError("`table.count` must be at least 2");
  const fs::path out = output_dir(args, cfg);
  auto os = open_file(out / "pressure_table.csv");
  emit_pressure_table(os, params, rho_min, rho_max, static_cast<std::size_t>(count));
  std::cout << "pressure table with " << count << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pedflow: two-way Aw-Rascle pedestrian flow models"};
  app.require_subcommand(1);

  CommonArgs sim_args, map_args, disp_args, pres_args;
  bool check = false;
  auto* sim = app.add_subcommand("simulate", "run a scenario and write CSV artifacts");
  add_common(sim, sim_args);
  sim->add_flag("--check", check, "evaluate the scenario's check.* expectations");
  auto* map = app.add_subcommand("hyperbolicity-map", "sign of the discriminant on a density grid");
  add_common(map, map_args);
  auto* disp = app.add_subcommand("dispersion", "dispersion relation of a uniform state");
  add_common(disp, disp_args);
  auto* pres = app.add_subcommand("pressure-table", "tabulate the one-way pressure law");
  add_common(pres, pres_args);
  auto* keys = app.add_subcommand("keys", "list the config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_args, check);
    if (*map) return cmd_map(map_args);
    if (*disp) return cmd_dispersion(disp_args);
    if (*pres) return cmd_pressure(pres_args);
    if (*keys) {
      for (const auto& [key, doc] : config_schema()) std::cout << key << "  " << doc << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
