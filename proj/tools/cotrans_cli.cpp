// cotrans: run simulations and validate scenario files.
//
//   cotrans sim-uav      [--config f] [--out dir] [--dt s] [--duration s] [--seed n] [--csv|--json]
//   cotrans sim-payload  ...
//   cotrans sim-mission  ...
//   cotrans robustness   ...
//   cotrans validate-config --config f
//
// Exit status: 0 on success, 1 when a run fails, 2 for bad input.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cotrans/errors.hpp"
#include "cotrans/mission.hpp"
#include "cotrans/scenarios.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  bool csv = false;
  bool json = false;
};

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (overrides output.dir)");
  cmd->add_option("--dt", o.dt, "Physics step [s]");
  cmd->add_option("--duration", o.duration, "Simulated time [s]");
  cmd->add_option("--seed", o.seed, "RNG seed");
  auto* csv = cmd->add_flag("--csv", o.csv, "Write CSV tables");
  auto* json = cmd->add_flag("--json", o.json, "Write JSON tables");
  csv->excludes(json);
}

cotrans::ScenarioConfig resolve(const RunOptions& o, cotrans::ScenarioKind kind) {
  cotrans::ScenarioConfig cfg =
      o.config.empty() ? cotrans::ScenarioConfig::defaults(kind) : cotrans::load_config(o.config);
  if (cfg.kind != kind) {
    throw cotrans::ConfigError("config describes a '" + cotrans::to_string(cfg.kind) + "' scenario, expected '" +
                               cotrans::to_string(kind) + "'");
  }
  if (o.dt) cfg.dt = *o.dt;
  if (o.duration) cfg.duration = *o.duration;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (o.csv) {
    cfg.output.csv = true;
    cfg.output.json = false;
  }
  if (o.json) {
    cfg.output.csv = false;
    cfg.output.json = true;
  }
  cfg.validate();
  return cfg;
}

int finish(const cotrans::RunLog& log, const cotrans::ScenarioConfig& cfg) {
  cotrans::write_run(log, cfg.output.dir, cfg.output.csv, cfg.output.json);
  std::cout << cotrans::summary_to_json(log.summary, log.scenario) << '\n';
  if (auto f = log.summary.get_note("failure")) {
    std::cerr << "run failed: " << *f << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative payload transport simulator"};
  app.require_subcommand(1);

  RunOptions uav, payload, mission, robust;
  auto* sim_uav = app.add_subcommand("sim-uav", "Single UAV tracking a reference");
  auto* sim_payload = app.add_subcommand("sim-payload", "Payload carried by the UAV team");
  auto* sim_mission = app.add_subcommand("sim-mission", "Formation, attach, transport, land and detach");
  auto* robustness = app.add_subcommand("robustness", "Wind gust and payload mass studies");
  add_run_flags(sim_uav, uav);
  add_run_flags(sim_payload, payload);
  add_run_flags(sim_mission, mission);
  add_run_flags(robustness, robust);

  std::string validate_path;
  bool print = false;
  auto* validate = app.add_subcommand("validate-config", "Check a scenario file and print its resolved form");
  validate->add_option("--config", validate_path, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  validate->add_flag("--print", print, "Print the resolved configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto cfg = cotrans::load_config(validate_path);
      if (print) std::cout << cotrans::dump_config(cfg) << '\n';
      std::cout << validate_path << ": ok (" << cotrans::to_string(cfg.kind) << ")\n";
      return 0;
    }
    if (*sim_uav) {
      const auto cfg = resolve(uav, cotrans::ScenarioKind::SingleUav);
      return finish(cotrans::run_single_uav(cfg), cfg);
    }
    if (*sim_payload) {
      const auto cfg = resolve(payload, cotrans::ScenarioKind::Payload);
      return finish(cotrans::run_payload(cfg), cfg);
    }
    if (*sim_mission) {
      const auto cfg = resolve(mission, cotrans::ScenarioKind::Mission);
      return finish(cotrans::run_mission(cfg).log, cfg);
    }
    if (*robustness) {
      const auto cfg = resolve(robust, cotrans::ScenarioKind::Robustness);
      const auto report = cotrans::run_robustness(cfg);
      cotrans::write_robustness(report, cfg.output.dir, cfg.output.csv, cfg.output.json);
      const auto summary = report.summary();
      std::cout << cotrans::summary_to_json(summary, "robustness") << '\n';
      if (auto f = summary.get_note("failure")) {
        std::cerr << "run failed: " << *f << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const cotrans::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cotrans::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
