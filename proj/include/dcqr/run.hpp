#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dcqr/device.hpp"
#include "dcqr/flow.hpp"
#include "dcqr/io.hpp"
#include "dcqr/svg.hpp"

namespace dcqr {

enum class Mode { solve, sweep, events, masses };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::solve: return "solve";
    case Mode::sweep: return "sweep";
    case Mode::events: return "events";
    case Mode::masses: return "masses";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "solve") return Mode::solve;
  if (s == "sweep") return Mode::sweep;
  if (s == "events") return Mode::events;
  if (s == "masses") return Mode::masses;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

/// Run configuration. Keys of the run file:
///   device (path, relative to the run file; omitted = shipped default geometry),
///   particle, grid (nm), mode, l_set (comma list), n_count, B, B_from, B_to, B_steps,
///   nonparabolic (on|off), threshold, heatmap (on|off), refine (on|off), out, flow.
struct RunConfig {
  std::filesystem::path device;
  Particle particle = Particle::electron;
  double grid = 0.5;
  Mode mode = Mode::solve;
  std::vector<int> l_set{0, -1};
  int n_count = 2;
  double field = 0.0;
  double field_from = 0.0, field_to = 7.0;
  int field_steps = 71;
  bool nonparabolic = false;
  double threshold = 0.7;
  bool heatmap = false;
  bool refine = true;
  std::filesystem::path out = "out";
  std::filesystem::path flow;  // input flow CSV for `events`; default <out>/flow.csv

  void validate() const {
    if (!(grid > 0.0) || !std::isfinite(grid)) throw ConfigError("grid spacing must be positive");
    if (n_count < 1) throw ConfigError("n_count must be at least 1");
    if (l_set.empty()) throw ConfigError("l_set must not be empty");
    for (std::size_t i = 0; i < l_set.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (l_set[i] == l_set[j]) throw ConfigError("l_set has duplicate entries");
      }
    }
    if (!(threshold > 0.5 && threshold < 1.0)) throw ConfigError("threshold must lie in (0.5, 1)");
    if (mode == Mode::sweep) {
      if (field_steps < 2) throw ConfigError("B_steps must be at least 2");
      if (!(io::quantize(field_to) > io::quantize(field_from))) {
        throw ConfigError("sweep needs B_to > B_from (distinct after rounding)");
      }
    }
  }
};

inline RunConfig parse_run_config(const KeyValueFile& file) {
  RunConfig cfg;
  using detail::parse_double;
  using detail::parse_int;
  for (const auto& e : file.entries()) {
    try {
      if (e.key == "device") {
        cfg.device = e.value.empty() ? std::filesystem::path{} : file.directory() / e.value;
      } else if (e.key == "particle") {
        cfg.particle = parse_particle(e.value);
      } else if (e.key == "grid") {
        cfg.grid = parse_double(e.value, e.key);
      } else if (e.key == "mode") {
        cfg.mode = parse_mode(e.value);
      } else if (e.key == "l_set") {
        cfg.l_set.clear();
        for (const auto& tok : detail::split(e.value, ',')) cfg.l_set.push_back(static_cast<int>(parse_int(tok, e.key)));
      } else if (e.key == "n_count") {
        cfg.n_count = static_cast<int>(parse_int(e.value, e.key));
      } else if (e.key == "B") {
        cfg.field = parse_double(e.value, e.key);
      } else if (e.key == "B_from") {
        cfg.field_from = parse_double(e.value, e.key);
      } else if (e.key == "B_to") {
        cfg.field_to = parse_double(e.value, e.key);
      } else if (e.key == "B_steps") {
        cfg.field_steps = static_cast<int>(parse_int(e.value, e.key));
      } else if (e.key == "nonparabolic") {
        cfg.nonparabolic = detail::parse_switch(e.value, e.key);
      } else if (e.key == "threshold") {
        cfg.threshold = parse_double(e.value, e.key);
      } else if (e.key == "heatmap") {
        cfg.heatmap = detail::parse_switch(e.value, e.key);
      } else if (e.key == "refine") {
        cfg.refine = detail::parse_switch(e.value, e.key);
      } else if (e.key == "out") {
        cfg.out = file.directory() / e.value;
      } else if (e.key == "flow") {
        cfg.flow = file.directory() / e.value;
      } else {
        throw ConfigError("unknown key '" + e.key + "'");
      }
    } catch (const ConfigError& err) {
      throw ConfigError(file.where(e) + ": " + err.what());
    }
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(KeyValueFile::load(path)); }

inline DeviceSpec resolve_device(const RunConfig& cfg) {
  if (cfg.device.empty()) return default_geometry(cfg.particle);
  if (!std::filesystem::exists(cfg.device)) throw IoError("device file not found: " + cfg.device.string());
  return load_device(cfg.device);
}

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<LabeledState> states;
  FlowTable flow;
  std::vector<CrossingEvent> events;
};

namespace detail {

/// Collects output files in memory; written together by `commit`.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::ostringstream& open(const std::string& name) { return files_[name]; }
  std::string text(const std::string& name) const { return files_.at(name).str(); }

  std::vector<std::filesystem::path> commit() const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, buf] : files_) {
      const auto path = dir_ / name;
      std::ofstream out(path, std::ios::binary);
      out << buf.str();
      if (!out) throw IoError("cannot write " + path.string());
      written.push_back(path);
    }
    return written;
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::ostringstream> files_;
};

inline SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions opt;
  opt.nonparabolic = cfg.nonparabolic;
  opt.threshold = cfg.threshold;
  return opt;
}

inline std::string branch_label(int n, int l) { return "(" + std::to_string(n) + "," + std::to_string(l) + ")"; }

/// Energy and rms-radius plots, built from the flow and event CSV text.
inline std::pair<std::string, std::string> sweep_plots(const std::string& flow_csv, const std::string& events_csv) {
  std::istringstream fin(flow_csv), ein(events_csv);
  const auto flow = io::read_flow_csv(fin);
  const auto events = io::read_events_csv(ein);
  svg::Plot energy{"Energy levels vs magnetic field", "B (T)", "E (meV)", {}, {}};
  svg::Plot radius{"rms radius vs magnetic field", "B (T)", "R (nm)", {}, {}};
  std::size_t color = 0;
  for (const int l : flow.l_values) {
    for (int n = 1; n <= flow.n_count; ++n) {
      const auto br = flow.branch(l, n);
      svg::Series e{branch_label(n, l), {}, {}, svg::palette()[color % svg::palette().size()], l == 0};
      svg::Series r = e;
      for (const auto& s : br) {
        e.x.push_back(s.field);
        e.y.push_back(s.energy);
        r.x.push_back(s.field);
        r.y.push_back(s.rms_radius);
      }
      energy.series.push_back(std::move(e));
      radius.series.push_back(std::move(r));
      ++color;
    }
  }
  for (const auto& ev : events) {
    const bool anti = ev.kind == EventKind::anti_crossing;
    svg::VerticalMarker m{ev.field, (anti ? "AC " : "X ") + io::format_float(std::round(ev.field * 100) / 100),
                          anti ? "#d62728" : "#555555"};
    energy.markers.push_back(m);
    if (anti) radius.markers.push_back(m);
  }
  return {svg::render(energy), svg::render(radius)};
}

}  // namespace detail

/// Levels at one field for every l in the config: states.csv, states.jsonl and, with
/// heatmap on, density_l<l>_n<n>.csv per state.
inline RunReport run_solve(const RunConfig& cfg) {
  cfg.validate();
  const auto spec = resolve_device(cfg);
  const auto grid = build_grid_spacing(spec, cfg.grid);
  const auto opt = detail::solve_options(cfg);
  RunReport report;
  detail::OutputSet out(cfg.out);
  for (const int l : cfg.l_set) {
    const auto levels = solve_levels(spec, grid, l, cfg.field, cfg.n_count, opt);
    const auto labeled = label_levels(levels, spec, grid, cfg.threshold);
    report.states.insert(report.states.end(), labeled.begin(), labeled.end());
    if (cfg.heatmap) {
      for (std::size_t s = 0; s < levels.states.size(); ++s) {
        io::write_density_csv(levels.states[s], grid,
                              out.open("density_l" + std::to_string(l) + "_n" + std::to_string(s + 1) + ".csv"));
      }
    }
  }
  io::write_states_csv(report.states, out.open("states.csv"));
  io::write_states_jsonl(report.states, out.open("states.jsonl"));
  report.files = out.commit();
  return report;
}

/// Field sweep: flow.csv, flow.jsonl, events.csv, energy_vs_B.svg, rms_vs_B.svg.
inline RunReport run_sweep(const RunConfig& cfg) {
  cfg.validate();
  const auto spec = resolve_device(cfg);
  const auto grid = build_grid_spacing(spec, cfg.grid);
  SweepOptions opt;
  opt.solve = detail::solve_options(cfg);
  opt.refine = cfg.refine;
  RunReport report;
  report.flow = sweep(spec, grid, cfg.l_set, cfg.n_count, cfg.field_from, cfg.field_to, cfg.field_steps, opt);
  // Events come from the rounded table so that `events` on the saved flow.csv reproduces them.
  report.events = detect_events(io::quantized(report.flow));

  detail::OutputSet out(cfg.out);
  io::write_flow_csv(report.flow, out.open("flow.csv"));
  io::write_flow_jsonl(report.flow, out.open("flow.jsonl"));
  io::write_events_csv(report.events, out.open("events.csv"));
  const auto [energy_svg, radius_svg] = detail::sweep_plots(out.text("flow.csv"), out.text("events.csv"));
  out.open("energy_vs_B.svg") << energy_svg;
  out.open("rms_vs_B.svg") << radius_svg;
  report.files = out.commit();
  return report;
}

/// Re-detects events from a saved flow CSV and writes events.csv next to the outputs.
inline RunReport run_events(const RunConfig& cfg) {
  const auto path = cfg.flow.empty() ? cfg.out / "flow.csv" : cfg.flow;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open flow CSV: " + path.string());
  RunReport report;
  report.flow = io::read_flow_csv(in);
  report.events = detect_events(report.flow);
  detail::OutputSet out(cfg.out);
  io::write_events_csv(report.events, out.open("events.csv"));
  report.files = out.commit();
  return report;
}

/// The linear mass law tabulated over the well depth, plus the self-consistent mass of
/// levels n = 1..n_count for the first l of the config at field B. Writes masses.csv and
/// the self-consistent levels as states.csv.
inline RunReport run_masses(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto spec = resolve_device(cfg);
  const auto model = MassModel::from(spec.material);
  detail::OutputSet out(cfg.out);
  auto& table = out.open("masses.csv");
  table << "energy_meV,mass\n";
  log << "# mass law m(E), " << to_string(spec.particle) << "\n# E_meV  mass_m0\n";
  constexpr int kRows = 20;
  for (int i = 0; i <= kRows; ++i) {
    const double e = model.well_depth * i / kRows;
    table << io::format_float(e) << ',' << io::format_float(model.mass_of_energy(e)) << '\n';
    log << io::format_float(e) << "  " << io::format_float(model.mass_of_energy(e)) << '\n';
  }
  RunReport report;
  if (cfg.nonparabolic || cfg.mode == Mode::masses) {
    const auto grid = build_grid_spacing(spec, cfg.grid);
    const int l = cfg.l_set.front();
    log << "# self-consistent levels, l = " << l << ", B = " << cfg.field << " T\n# n  E_meV  mass_m0  iterations  p\n";
    for (int n = 1; n <= cfg.n_count; ++n) {
      const auto r = solve_self_consistent(spec, grid, l, cfg.field, n);
      auto s = label_state(r.state, spec, grid, n, r.converged_mass, cfg.threshold);
      log << n << "  " << io::format_float(s.energy) << "  " << io::format_float(s.mass) << "  " << r.iterations << "  "
          << to_string(s.p) << '\n';
      report.states.push_back(s);
    }
    io::write_states_csv(report.states, out.open("states.csv"));
  }
  report.files = out.commit();
  return report;
}

}  // namespace dcqr
