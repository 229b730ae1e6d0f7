#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcqr/config.hpp"
#include "dcqr/flow.hpp"

// CSV layout is frozen: column order as in the headers below, floats as "%.9g".

namespace dcqr::io {

inline constexpr const char* kFlowHeader =
    "B,l,branch,n,p,energy_meV,rms_nm,prob_inner,prob_outer,prob_barrier,mass";
inline constexpr const char* kStatesHeader =
    "B,l,n,p,energy_meV,rms_nm,prob_inner,prob_outer,prob_barrier,mass";
inline constexpr const char* kEventsHeader =
    "kind,B_star,gap_meV,n_a,l_a,p_a_before,p_a_after,n_b,l_b,p_b_before,p_b_after";

inline std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// The value a float takes after one trip through the CSV format.
inline double quantize(double v) { return std::stod(format_float(v)); }

namespace detail {

inline std::vector<std::vector<std::string>> read_rows(std::istream& in, const char* header, std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ConfigError("unexpected CSV header: " + line);
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = dcqr::detail::split(line, ',');
    if (cells.size() != columns) {
      throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline void write_state_columns(std::ostream& out, const LabeledState& s) {
  out << to_string(s.p) << ',' << format_float(s.energy) << ',' << format_float(s.rms_radius) << ','
      << format_float(s.prob_inner) << ',' << format_float(s.prob_outer) << ',' << format_float(s.prob_barrier) << ','
      << format_float(s.mass);
}

inline void read_state_columns(const std::vector<std::string>& c, std::size_t at, LabeledState& s) {
  using dcqr::detail::parse_double;
  s.p = parse_localization(c[at]);
  s.energy = parse_double(c[at + 1], "energy_meV");
  s.rms_radius = parse_double(c[at + 2], "rms_nm");
  s.prob_inner = parse_double(c[at + 3], "prob_inner");
  s.prob_outer = parse_double(c[at + 4], "prob_outer");
  s.prob_barrier = parse_double(c[at + 5], "prob_barrier");
  s.mass = parse_double(c[at + 6], "mass");
}

inline nlohmann::json state_json(const LabeledState& s) {
  return {{"B", s.field},           {"l", s.l},
          {"n", s.n},               {"p", to_string(s.p)},
          {"energy_meV", s.energy}, {"rms_nm", s.rms_radius},
          {"prob_inner", s.prob_inner}, {"prob_outer", s.prob_outer},
          {"prob_barrier", s.prob_barrier}, {"mass", s.mass}};
}

}  // namespace detail

// --- flow tables ---

inline void write_flow_csv(const FlowTable& flow, std::ostream& out) {
  out << kFlowHeader << '\n';
  for (const auto& row : flow.rows) {
    const auto& s = row.state;
    out << format_float(s.field) << ',' << s.l << ',' << row.branch << ',' << s.n << ',';
    detail::write_state_columns(out, s);
    out << '\n';
  }
}

inline FlowTable read_flow_csv(std::istream& in) {
  using dcqr::detail::parse_double;
  using dcqr::detail::parse_int;
  const auto rows = detail::read_rows(in, kFlowHeader, 11);
  FlowTable flow;
  for (const auto& c : rows) {
    FlowRow r;
    r.state.field = parse_double(c[0], "B");
    r.state.l = static_cast<int>(parse_int(c[1], "l"));
    r.branch = static_cast<int>(parse_int(c[2], "branch"));
    r.state.n = static_cast<int>(parse_int(c[3], "n"));
    detail::read_state_columns(c, 4, r.state);
    if (flow.fields.empty() || flow.fields.back() != r.state.field) flow.fields.push_back(r.state.field);
    if (flow.fields.size() == 1 && std::find(flow.l_values.begin(), flow.l_values.end(), r.state.l) == flow.l_values.end()) {
      flow.l_values.push_back(r.state.l);
    }
    flow.n_count = std::max(flow.n_count, r.branch + 1);
    flow.rows.push_back(r);
  }
  if (flow.rows.empty()) throw ConfigError("flow CSV has no rows");
  if (flow.rows.size() != flow.fields.size() * flow.l_values.size() * static_cast<std::size_t>(flow.n_count)) {
    throw ConfigError("flow CSV is not a complete field x l x branch table");
  }
  for (std::size_t f = 0; f < flow.fields.size(); ++f) {
    for (std::size_t li = 0; li < flow.l_values.size(); ++li) {
      for (int b = 0; b < flow.n_count; ++b) {
        const auto& r = flow.rows[flow.row_index(f, li, b)];
        if (r.branch != b || r.state.l != flow.l_values[li] || r.state.field != flow.fields[f]) {
          throw ConfigError("flow CSV rows are out of order");
        }
      }
    }
  }
  flow.overlaps.assign(flow.rows.size(), std::numeric_limits<double>::quiet_NaN());
  return flow;
}

inline void write_flow_jsonl(const FlowTable& flow, std::ostream& out) {
  for (const auto& row : flow.rows) {
    auto j = detail::state_json(row.state);
    j["branch"] = row.branch;
    out << j.dump() << '\n';
  }
}

/// The table as it reads back from CSV.
inline FlowTable quantized(const FlowTable& flow) {
  FlowTable q = flow;
  for (auto& f : q.fields) f = quantize(f);
  for (auto& r : q.rows) {
    auto& s = r.state;
    s.field = quantize(s.field);
    s.energy = quantize(s.energy);
    s.rms_radius = quantize(s.rms_radius);
    s.prob_inner = quantize(s.prob_inner);
    s.prob_outer = quantize(s.prob_outer);
    s.prob_barrier = quantize(s.prob_barrier);
    s.mass = quantize(s.mass);
  }
  return q;
}

// --- fixed-field states ---

inline void write_states_csv(const std::vector<LabeledState>& states, std::ostream& out) {
  out << kStatesHeader << '\n';
  for (const auto& s : states) {
    out << format_float(s.field) << ',' << s.l << ',' << s.n << ',';
    detail::write_state_columns(out, s);
    out << '\n';
  }
}

inline std::vector<LabeledState> read_states_csv(std::istream& in) {
  using dcqr::detail::parse_double;
  using dcqr::detail::parse_int;
  std::vector<LabeledState> out;
  for (const auto& c : detail::read_rows(in, kStatesHeader, 10)) {
    LabeledState s;
    s.field = parse_double(c[0], "B");
    s.l = static_cast<int>(parse_int(c[1], "l"));
    s.n = static_cast<int>(parse_int(c[2], "n"));
    detail::read_state_columns(c, 3, s);
    out.push_back(s);
  }
  return out;
}

inline void write_states_jsonl(const std::vector<LabeledState>& states, std::ostream& out) {
  for (const auto& s : states) out << detail::state_json(s).dump() << '\n';
}

// --- events ---

inline void write_events_csv(const std::vector<CrossingEvent>& events, std::ostream& out) {
  out << kEventsHeader << '\n';
  for (const auto& e : events) {
    out << to_string(e.kind) << ',' << format_float(e.field) << ',' << format_float(e.gap) << ',' << e.first.n << ','
        << e.first.l << ',' << to_string(e.first.p_before) << ',' << to_string(e.first.p_after) << ',' << e.second.n
        << ',' << e.second.l << ',' << to_string(e.second.p_before) << ',' << to_string(e.second.p_after) << '\n';
  }
}

inline std::vector<CrossingEvent> read_events_csv(std::istream& in) {
  using dcqr::detail::parse_double;
  using dcqr::detail::parse_int;
  std::vector<CrossingEvent> out;
  for (const auto& c : detail::read_rows(in, kEventsHeader, 11)) {
    CrossingEvent e;
    e.kind = parse_event_kind(c[0]);
    e.field = parse_double(c[1], "B_star");
    e.gap = parse_double(c[2], "gap_meV");
    e.first = {static_cast<int>(parse_int(c[3], "n_a")), static_cast<int>(parse_int(c[4], "l_a")),
               parse_localization(c[5]), parse_localization(c[6])};
    e.second = {static_cast<int>(parse_int(c[7], "n_b")), static_cast<int>(parse_int(c[8], "l_b")),
                parse_localization(c[9]), parse_localization(c[10])};
    out.push_back(e);
  }
  return out;
}

// --- envelopes ---

/// |Phi|^2 on the grid as rho,z,density rows (rho-major).
inline void write_density_csv(const EigenState& state, const Grid& grid, std::ostream& out) {
  out << "rho_nm,z_nm,density\n";
  for (std::size_t i = 0; i < grid.n_rho; ++i) {
    for (std::size_t j = 0; j < grid.n_z; ++j) {
      const double phi = state.envelope[grid.index(i, j)];
      out << format_float(grid.rho_nodes[i]) << ',' << format_float(grid.z_nodes[j]) << ',' << format_float(phi * phi)
          << '\n';
    }
  }
}

}  // namespace dcqr::io
