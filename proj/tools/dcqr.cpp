// dcqr — eigenstates, field sweeps and level events of a double concentric quantum ring.
//
//   dcqr solve  --config configs/solve.conf
//   dcqr sweep  --config configs/sweep.conf --out results/
//   dcqr events --flow results/flow.csv --out results/
//   dcqr masses --config configs/masses.conf
//
// Without a subcommand the `mode` key of the run file decides. Errors are reported as a
// single JSON object on stderr; the exit code tells the category apart
// (1 other, 2 configuration, 3 I/O, 4 solver).

#include <chrono>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcqr/run.hpp"

namespace {

int report_error(const char* category, const std::string& message, int code, std::optional<double> residual = {}) {
  nlohmann::json err{{"error", category}, {"message", message}, {"exit_code", code}};
  if (residual) err["residual"] = *residual;
  std::cerr << err.dump() << std::endl;
  return code;
}

struct Overrides {
  std::string config;
  std::string out;
  std::string flow;
  std::optional<double> grid;
  std::optional<double> field;
  bool parabolic = false;
  bool nonparabolic = false;
};

dcqr::RunConfig build_config(const Overrides& o, std::optional<dcqr::Mode> mode) {
  dcqr::RunConfig cfg = o.config.empty() ? dcqr::RunConfig{} : dcqr::load_run_config(o.config);
  if (mode) cfg.mode = *mode;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.flow.empty()) cfg.flow = o.flow;
  if (o.grid) cfg.grid = *o.grid;
  if (o.field) cfg.field = *o.field;
  if (o.parabolic) cfg.nonparabolic = false;
  if (o.nonparabolic) cfg.nonparabolic = true;
  return cfg;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "Run file (key = value)")->check(CLI::ExistingFile);
  app->add_option("-o,--out", o.out, "Output directory");
  app->add_option("--grid", o.grid, "Grid spacing in nm");
  app->add_option("-B,--field", o.field, "Magnetic field in T (solve, masses)");
  auto* par = app->add_flag("--parabolic", o.parabolic, "Use the fixed well mass");
  auto* np = app->add_flag("--nonparabolic", o.nonparabolic, "Use the energy-dependent mass");
  par->excludes(np);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double concentric quantum ring: levels, magnetic-field sweeps and level events"};
  app.set_version_flag("--version", "dcqr 1.0.0");
  Overrides o;
  add_common(&app, o);

  auto* solve = app.add_subcommand("solve", "Lowest levels at one field (states.csv, states.jsonl)");
  auto* sweep = app.add_subcommand("sweep", "Field sweep with branch tracking and event detection");
  auto* events = app.add_subcommand("events", "Detect crossings and anti-crossings in a saved flow CSV");
  auto* masses = app.add_subcommand("masses", "Energy-dependent mass table and self-consistent masses");
  for (auto* sub : {solve, sweep, events, masses}) add_common(sub, o);
  events->add_option("--flow", o.flow, "Flow CSV (default <out>/flow.csv)")->check(CLI::ExistingFile);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    std::optional<dcqr::Mode> mode;
    if (solve->parsed()) mode = dcqr::Mode::solve;
    if (sweep->parsed()) mode = dcqr::Mode::sweep;
    if (events->parsed()) mode = dcqr::Mode::events;
    if (masses->parsed()) mode = dcqr::Mode::masses;
    if (!mode && o.config.empty()) {
      std::cout << app.help();
      return 1;
    }
    const auto cfg = build_config(o, mode);
    const auto t0 = std::chrono::steady_clock::now();

    dcqr::RunReport report;
    switch (cfg.mode) {
      case dcqr::Mode::solve: {
        report = dcqr::run_solve(cfg);
        std::cout << "# l  n  E_meV  rms_nm  p\n";
        for (const auto& s : report.states) {
          std::cout << s.l << "  " << s.n << "  " << dcqr::io::format_float(s.energy) << "  "
                    << dcqr::io::format_float(s.rms_radius) << "  " << dcqr::to_string(s.p) << '\n';
        }
        break;
      }
      case dcqr::Mode::sweep:
        report = dcqr::run_sweep(cfg);
        std::cout << "fields: " << report.flow.fields.size() << ", events: " << report.events.size() << '\n';
        break;
      case dcqr::Mode::events:
        report = dcqr::run_events(cfg);
        std::cout << "events: " << report.events.size() << '\n';
        break;
      case dcqr::Mode::masses:
        report = dcqr::run_masses(cfg, std::cout);
        break;
    }
    for (const auto& e : report.events) {
      std::cout << dcqr::to_string(e.kind) << " at B = " << dcqr::io::format_float(e.field) << " T, gap "
                << dcqr::io::format_float(e.gap) << " meV\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
    std::cout << "done in " << secs << " s\n";
    return 0;
  } catch (const dcqr::ConfigError& e) {
    return report_error("config", e.what(), 2);
  } catch (const dcqr::IoError& e) {
    return report_error("io", e.what(), 3);
  } catch (const dcqr::EigenSolveError& e) {
    return report_error("solver", e.what(), 4, e.residual());
  } catch (const dcqr::SelfConsistencyError& e) {
    return report_error("solver", e.what(), 4);
  } catch (const dcqr::SweepError& e) {
    return report_error("solver", e.what(), 4);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
}
