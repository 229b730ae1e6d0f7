#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcqr/constants.hpp"
#include "dcqr/eigensolver.hpp"
#include "dcqr/parallel.hpp"
#include "dcqr/selfmass.hpp"

namespace dcqr {

/// Which ring carries the electron; `delocalized` when neither side dominates.
enum class Localization { inner, outer, delocalized };

inline std::string to_string(Localization p) {
  switch (p) {
    case Localization::inner: return "inner";
    case Localization::outer: return "outer";
    case Localization::delocalized: return "delocalized";
  }
  return "?";
}

inline Localization parse_localization(std::string_view s) {
  if (s == "inner") return Localization::inner;
  if (s == "outer") return Localization::outer;
  if (s == "delocalized") return Localization::delocalized;
  throw std::invalid_argument("unknown localization '" + std::string(s) + "'");
}

// --- single-state observables ---------------------------------------------------------

/// sqrt(<rho^2>) under the rho-weighted measure (the azimuthal integral is 1).
inline double rms_radius(const EigenState& state, const Grid& grid) {
  double sum = 0.0;
  for (std::size_t k = 0; k < state.envelope.size(); ++k) {
    const double rho = grid.rho_nodes[k / grid.n_z];
    sum += grid.weight(k) * state.envelope[k] * state.envelope[k] * rho * rho;
  }
  return std::sqrt(sum);
}

struct RegionProbabilities {
  double inner = 0.0;       // inside inner-ring regions
  double outer = 0.0;       // inside outer-ring regions
  double barrier = 0.0;     // substrate
  double inner_side = 0.0;  // everything below the inner/outer divider, barrier included
};

inline RegionProbabilities region_probabilities(const EigenState& state, const DeviceSpec& spec, const Grid& grid) {
  RegionProbabilities p;
  const double divider = inner_outer_divider(spec);
  for (std::size_t k = 0; k < state.envelope.size(); ++k) {
    const double mass = grid.weight(k) * state.envelope[k] * state.envelope[k];
    if (mass == 0.0) continue;
    const double rho = grid.rho_nodes[k / grid.n_z], z = grid.z_nodes[k % grid.n_z];
    switch (region_of(spec, rho, z)) {
      case RegionLabel::inner: p.inner += mass; break;
      case RegionLabel::outer: p.outer += mass; break;
      case RegionLabel::barrier: p.barrier += mass; break;
    }
    if (rho < divider) p.inner_side += mass;
  }
  return p;
}

inline Localization classify(const RegionProbabilities& p, double threshold) {
  const double total = p.inner + p.outer + p.barrier;
  if (p.inner_side >= threshold * total) return Localization::inner;
  if (total - p.inner_side >= threshold * total) return Localization::outer;
  return Localization::delocalized;
}

/// Inner if at least `threshold` of the probability lies on the inner side of the
/// midpoint between the rings, outer if at least `threshold` lies beyond it.
inline Localization classify(const EigenState& state, const DeviceSpec& spec, const Grid& grid,
                             double threshold = 0.7) {
  if (!(threshold > 0.5 && threshold < 1.0)) throw std::invalid_argument("classification threshold must be in (0.5, 1)");
  return classify(region_probabilities(state, spec, grid), threshold);
}

struct LabeledState {
  int n = 1;
  int l = 0;
  Localization p = Localization::delocalized;
  double field = 0.0;       // T
  double energy = 0.0;      // meV
  double rms_radius = 0.0;  // nm
  double prob_inner = 0.0, prob_outer = 0.0, prob_barrier = 0.0;
  double mass = 0.0;        // ring effective mass used for this state (m0)

  bool operator==(const LabeledState&) const = default;
};

inline LabeledState label_state(const EigenState& state, const DeviceSpec& spec, const Grid& grid, int n, double mass,
                                double threshold = 0.7) {
  const auto probs = region_probabilities(state, spec, grid);
  LabeledState s;
  s.n = n;
  s.l = state.l;
  s.field = state.field;
  s.energy = state.energy;
  s.rms_radius = rms_radius(state, grid);
  const double total = probs.inner + probs.outer + probs.barrier;
  s.prob_inner = probs.inner / total;
  s.prob_outer = probs.outer / total;
  s.prob_barrier = probs.barrier / total;
  s.p = classify(probs, threshold);
  s.mass = mass;
  return s;
}

// --- ideal-ring analytics -------------------------------------------------------------

/// Energy of an ideal one-dimensional ring of radius R threaded by flux pi R^2 B.
inline double ideal_ring_energy(int l, double field, double radius, double m_eff) {
  if (!(radius > 0.0)) throw std::invalid_argument("ring radius must be positive");
  const auto& pc = kConstants;
  const double flux_ratio = kPi * radius * radius * field / pc.flux_quantum;
  const double a = static_cast<double>(l) + flux_ratio;
  return pc.hbar2_over_2m0 / m_eff / (radius * radius) * a * a;
}

/// Half of the Aharonov-Bohm period Phi0 / (pi R^2): the field of the first l -> l-1 crossing.
inline double ab_half_period(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ring radius must be positive");
  return kConstants.flux_quantum / (2.0 * kPi * radius * radius);
}

// --- fixed-field solves ---------------------------------------------------------------

struct SolveOptions {
  bool nonparabolic = false;
  double threshold = 0.7;
  EigenOptions eigen{};
  SelfConsistentOptions selfmass{};
};

struct SolvedLevels {
  std::vector<EigenState> states;  // ascending per-l index n = 1..count
  std::vector<double> masses;
};

/// The `count` lowest levels for one (l, B). In non-parabolic mode each level carries its own
/// self-consistent ring mass; otherwise every level uses the bulk well mass.
inline SolvedLevels solve_levels(const DeviceSpec& spec, const Grid& grid, int l, double field, int count,
                                 const SolveOptions& opt = {}) {
  SolvedLevels out;
  if (!opt.nonparabolic) {
    const double m = spec.material.m_well;
    out.states = lowest_eigenpairs(assemble(grid, spec, sample_mass(spec, grid, m), l, field), count, opt.eigen);
    out.masses.assign(static_cast<std::size_t>(count), m);
    return out;
  }
  auto sc_opt = opt.selfmass;
  sc_opt.eigen = opt.eigen;
  for (int n = 1; n <= count; ++n) {
    auto r = solve_self_consistent(spec, grid, l, field, n, sc_opt);
    out.states.push_back(std::move(r.state));
    out.masses.push_back(r.converged_mass);
  }
  return out;
}

inline std::vector<LabeledState> label_levels(const SolvedLevels& levels, const DeviceSpec& spec, const Grid& grid,
                                              double threshold = 0.7) {
  std::vector<LabeledState> out;
  for (std::size_t s = 0; s < levels.states.size(); ++s) {
    out.push_back(label_state(levels.states[s], spec, grid, static_cast<int>(s) + 1, levels.masses[s], threshold));
  }
  return out;
}

// --- field sweeps ---------------------------------------------------------------------

struct FlowRow {
  int branch = 0;  // 0-based; the state's n is branch + 1
  LabeledState state;

  bool operator==(const FlowRow&) const = default;
};

/// Per-field labeled spectra. Rows are ordered by field, then l (in `l_values` order),
/// then branch. `overlaps` (not serialized) holds the envelope overlap of each row with the
/// same branch at the previous field, NaN for the first field.
struct FlowTable {
  std::vector<double> fields;
  std::vector<int> l_values;
  int n_count = 0;
  std::vector<FlowRow> rows;
  std::vector<double> overlaps;

  std::size_t row_index(std::size_t field_idx, std::size_t l_idx, int branch) const {
    return (field_idx * l_values.size() + l_idx) * static_cast<std::size_t>(n_count) + static_cast<std::size_t>(branch);
  }
  const LabeledState& at(std::size_t field_idx, std::size_t l_idx, int branch) const {
    return rows[row_index(field_idx, l_idx, branch)].state;
  }
  std::size_t l_index(int l) const {
    const auto it = std::find(l_values.begin(), l_values.end(), l);
    if (it == l_values.end()) throw std::out_of_range("l not in flow table: " + std::to_string(l));
    return static_cast<std::size_t>(it - l_values.begin());
  }
  /// The tracked branch (l, n) across all fields.
  std::vector<LabeledState> branch(int l, int n) const {
    const auto li = l_index(l);
    std::vector<LabeledState> out;
    for (std::size_t f = 0; f < fields.size(); ++f) out.push_back(at(f, li, n - 1));
    return out;
  }
  /// Energies of level l sorted ascending at field index f.
  std::vector<double> sorted_energies(std::size_t f, std::size_t li) const {
    std::vector<double> e;
    for (int b = 0; b < n_count; ++b) e.push_back(at(f, li, b).energy);
    std::sort(e.begin(), e.end());
    return e;
  }
  bool same_content(const FlowTable& o) const {
    return fields == o.fields && l_values == o.l_values && n_count == o.n_count && rows == o.rows;
  }
};

/// A solver failure during a sweep, tagged with the offending field.
class SweepError : public std::runtime_error {
 public:
  SweepError(double field, int l, const std::string& what)
      : std::runtime_error("at B = " + std::to_string(field) + " T, l = " + std::to_string(l) + ": " + what),
        field_(field),
        l_(l) {}
  double field() const { return field_; }
  int l() const { return l_; }

 private:
  double field_;
  int l_;
};

struct SweepOptions {
  SolveOptions solve{};
  bool refine = true;
  double refine_step = 0.01;       // T
  double refine_halfwidth = 0.3;   // T
  bool pin_anticrossings = true;   // add a solve exactly at each refined gap minimum
  int workers = 0;                 // 0: default_workers()
};

namespace detail {

/// Branch assignment maximizing the summed |overlap|; exhaustive for small n, greedy beyond.
inline std::vector<int> best_assignment(const std::vector<std::vector<double>>& ov) {
  const int n = static_cast<int>(ov.size());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  if (n <= 7) {
    std::vector<int> best = perm;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (int b = 0; b < n; ++b) score += ov[static_cast<std::size_t>(b)][static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])];
      if (score > best_score + 1e-12) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<bool> used_b(static_cast<std::size_t>(n)), used_s(static_cast<std::size_t>(n));
  for (int round = 0; round < n; ++round) {
    double best = -1.0;
    int bb = 0, bs = 0;
    for (int b = 0; b < n; ++b) {
      if (used_b[static_cast<std::size_t>(b)]) continue;
      for (int s = 0; s < n; ++s) {
        if (used_s[static_cast<std::size_t>(s)]) continue;
        if (ov[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)] > best) {
          best = ov[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)];
          bb = b;
          bs = s;
        }
      }
    }
    used_b[static_cast<std::size_t>(bb)] = used_s[static_cast<std::size_t>(bs)] = true;
    perm[static_cast<std::size_t>(bb)] = bs;
  }
  return perm;
}

/// Minimum of a hyperbolic gap from three samples: the vertex of the parabola through
/// (B, gap^2). Falls back to the middle sample when the fit does not bracket a minimum.
inline std::pair<double, double> gap_minimum(double x0, double x1, double x2, double g0, double g1, double g2) {
  const double y0 = g0 * g0, y1 = g1 * g1, y2 = g2 * g2;
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a > 0.0) {
    const double b = d01 - a * (x0 + x1);
    const double c = y0 - x0 * (a * x0 + b);
    const double v = -b / (2.0 * a);
    if (v >= x0 && v <= x2) return {v, std::sqrt(std::max(std::min(y1, c - b * b / (4.0 * a)), 0.0))};
  }
  return {x1, g1};
}

inline double lattice_field(double from, double step, long k) { return from + step * static_cast<double>(k); }

/// Candidate event fields from per-l sorted energies: interior gap minima and
/// sign changes between equal-index levels of different l.
inline std::vector<double> candidate_events(const std::vector<double>& fields, const std::vector<int>& l_values,
                                            int n_count,
                                            const std::vector<std::vector<std::vector<double>>>& energies) {
  // energies[f][li][s], sorted in s
  std::vector<double> out;
  const std::size_t nf = fields.size();
  for (std::size_t li = 0; li < l_values.size(); ++li) {
    for (int s = 0; s + 1 < n_count; ++s) {
      for (std::size_t f = 1; f + 1 < nf; ++f) {
        const auto gap = [&](std::size_t k) { return energies[k][li][static_cast<std::size_t>(s) + 1] - energies[k][li][static_cast<std::size_t>(s)]; };
        if (gap(f) < gap(f - 1) && gap(f) <= gap(f + 1)) out.push_back(fields[f]);
      }
    }
  }
  for (std::size_t la = 0; la < l_values.size(); ++la) {
    for (std::size_t lb = la + 1; lb < l_values.size(); ++lb) {
      for (int s = 0; s < n_count; ++s) {
        for (std::size_t f = 0; f + 1 < nf; ++f) {
          const double d0 = energies[f][la][static_cast<std::size_t>(s)] - energies[f][lb][static_cast<std::size_t>(s)];
          const double d1 = energies[f + 1][la][static_cast<std::size_t>(s)] - energies[f + 1][lb][static_cast<std::size_t>(s)];
          if ((d0 < 0.0) != (d1 < 0.0)) out.push_back(0.5 * (fields[f] + fields[f + 1]));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Solves the `n_count` lowest levels for every l in `l_set` on an evenly spaced field grid,
/// optionally refines around candidate events, and tracks branches across fields by maximal
/// envelope overlap with the previous field. Branches are numbered by energy at `field_from`.
inline FlowTable sweep(const DeviceSpec& spec, const Grid& grid, const std::vector<int>& l_set, int n_count,
                       double field_from, double field_to, int field_steps, const SweepOptions& opt = {}) {
  if (field_steps < 2 || !(field_to > field_from)) throw std::invalid_argument("sweep needs at least two distinct fields");
  if (n_count < 1 || l_set.empty()) throw std::invalid_argument("sweep needs n_count >= 1 and a non-empty l set");
  const int workers = opt.workers > 0 ? opt.workers : default_workers();
  const std::size_t nl = l_set.size();

  std::vector<double> fields = uniform_nodes(field_from, field_to, static_cast<std::size_t>(field_steps));
  std::map<double, std::vector<SolvedLevels>> solved;  // field -> per-l levels

  const auto solve_fields = [&](const std::vector<double>& todo) {
    std::vector<SolvedLevels> out(todo.size() * nl);
    parallel_for(out.size(), workers, [&](std::size_t task) {
      const double b = todo[task / nl];
      const int l = l_set[task % nl];
      try {
        out[task] = solve_levels(spec, grid, l, b, n_count, opt.solve);
      } catch (const std::exception& e) {
        throw SweepError(b, l, e.what());
      }
    });
    for (std::size_t f = 0; f < todo.size(); ++f) {
      auto& slot = solved[todo[f]];
      for (std::size_t li = 0; li < nl; ++li) slot.push_back(std::move(out[f * nl + li]));
    }
  };
  const auto sorted_energy_table = [&](const std::vector<double>& fs) {
    std::vector<std::vector<std::vector<double>>> e(fs.size(), std::vector<std::vector<double>>(nl));
    for (std::size_t f = 0; f < fs.size(); ++f) {
      for (std::size_t li = 0; li < nl; ++li) {
        for (const auto& st : solved.at(fs[f])[li].states) e[f][li].push_back(st.energy);
        std::sort(e[f][li].begin(), e[f][li].end());
      }
    }
    return e;
  };

  solve_fields(fields);

  if (opt.refine && opt.refine_step > 0.0) {
    const auto centers = detail::candidate_events(fields, l_set, n_count, sorted_energy_table(fields));
    std::vector<double> extra;
    for (const double c : centers) {
      const long k_lo = static_cast<long>(std::ceil((c - opt.refine_halfwidth - field_from) / opt.refine_step - 1e-9));
      const long k_hi = static_cast<long>(std::floor((c + opt.refine_halfwidth - field_from) / opt.refine_step + 1e-9));
      for (long k = std::max(0L, k_lo); k <= k_hi; ++k) {
        const double b = detail::lattice_field(field_from, opt.refine_step, k);
        if (b > field_to + 1e-12) break;
        extra.push_back(b);
      }
    }
    std::sort(extra.begin(), extra.end());
    std::vector<double> todo;
    for (const double b : extra) {
      const bool known = std::any_of(fields.begin(), fields.end(), [b](double f) { return std::abs(f - b) < 1e-9; }) ||
                         (!todo.empty() && std::abs(todo.back() - b) < 1e-9);
      if (!known) todo.push_back(b);
    }
    solve_fields(todo);
    fields.insert(fields.end(), todo.begin(), todo.end());
    std::sort(fields.begin(), fields.end());

    if (opt.pin_anticrossings) {
      const auto e = sorted_energy_table(fields);
      std::vector<double> pins;
      for (std::size_t li = 0; li < nl; ++li) {
        for (int s = 0; s + 1 < n_count; ++s) {
          const auto gap = [&](std::size_t k) { return e[k][li][static_cast<std::size_t>(s) + 1] - e[k][li][static_cast<std::size_t>(s)]; };
          for (std::size_t f = 1; f + 1 < fields.size(); ++f) {
            if (!(gap(f) < gap(f - 1) && gap(f) <= gap(f + 1))) continue;
            const double b = detail::gap_minimum(fields[f - 1], fields[f], fields[f + 1], gap(f - 1), gap(f), gap(f + 1)).first;
            const bool known = std::any_of(fields.begin(), fields.end(), [b](double x) { return std::abs(x - b) < 1e-6; }) ||
                               std::any_of(pins.begin(), pins.end(), [b](double x) { return std::abs(x - b) < 1e-6; });
            if (!known) pins.push_back(b);
          }
        }
      }
      std::sort(pins.begin(), pins.end());
      solve_fields(pins);
      fields.insert(fields.end(), pins.begin(), pins.end());
      std::sort(fields.begin(), fields.end());
    }
  }

  FlowTable table;
  table.fields = fields;
  table.l_values = l_set;
  table.n_count = n_count;
  table.rows.resize(fields.size() * nl * static_cast<std::size_t>(n_count));
  table.overlaps.assign(table.rows.size(), std::numeric_limits<double>::quiet_NaN());

  const auto weights = grid.weights();
  const auto overlap = [&weights](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += weights[k] * a[k] * b[k];
    return std::abs(s);
  };

  for (std::size_t li = 0; li < nl; ++li) {
    std::vector<int> assign(static_cast<std::size_t>(n_count));
    std::iota(assign.begin(), assign.end(), 0);
    const SolvedLevels* prev = nullptr;
    std::vector<int> prev_assign;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const auto& cur = solved.at(fields[f])[li];
      std::vector<double> ov_of_branch(static_cast<std::size_t>(n_count), std::numeric_limits<double>::quiet_NaN());
      if (prev != nullptr) {
        std::vector<std::vector<double>> ov(static_cast<std::size_t>(n_count), std::vector<double>(static_cast<std::size_t>(n_count)));
        for (int b = 0; b < n_count; ++b) {
          const auto& pb = prev->states[static_cast<std::size_t>(prev_assign[static_cast<std::size_t>(b)])].envelope;
          for (int s = 0; s < n_count; ++s) ov[static_cast<std::size_t>(b)][static_cast<std::size_t>(s)] = overlap(pb, cur.states[static_cast<std::size_t>(s)].envelope);
        }
        assign = detail::best_assignment(ov);
        for (int b = 0; b < n_count; ++b) ov_of_branch[static_cast<std::size_t>(b)] = ov[static_cast<std::size_t>(b)][static_cast<std::size_t>(assign[static_cast<std::size_t>(b)])];
      }
      for (int b = 0; b < n_count; ++b) {
        const auto s = static_cast<std::size_t>(assign[static_cast<std::size_t>(b)]);
        const auto idx = table.row_index(f, li, b);
        table.rows[idx].branch = b;
        table.rows[idx].state = label_state(cur.states[s], spec, grid, b + 1, cur.masses[s], opt.solve.threshold);
        table.overlaps[idx] = ov_of_branch[static_cast<std::size_t>(b)];
      }
      prev = &cur;
      prev_assign = assign;
    }
  }
  return table;
}

// --- events ---------------------------------------------------------------------------

enum class EventKind { crossing, anti_crossing };

inline std::string to_string(EventKind k) { return k == EventKind::crossing ? "crossing" : "anti_crossing"; }

inline EventKind parse_event_kind(std::string_view s) {
  if (s == "crossing") return EventKind::crossing;
  if (s == "anti_crossing") return EventKind::anti_crossing;
  throw std::invalid_argument("unknown event kind '" + std::string(s) + "'");
}

struct BranchRef {
  int n = 1;
  int l = 0;
  Localization p_before = Localization::delocalized;
  Localization p_after = Localization::delocalized;

  bool operator==(const BranchRef&) const = default;
};

struct CrossingEvent {
  EventKind kind = EventKind::crossing;
  double field = 0.0;  // T
  double gap = 0.0;    // meV; zero for crossings
  BranchRef first, second;

  bool operator==(const CrossingEvent&) const = default;
};

struct EventOptions {
  /// Localization before/after an anti-crossing is read this far (T) from the event.
  double context = 0.3;
  /// Also report crossings between branches of different n (levels of different rings).
  bool include_cross_ring = false;
};

/// Crossings: sign changes of E_a - E_b for tracked branches of different l (same n unless
/// include_cross_ring), located by linear interpolation. Anti-crossings: interior local
/// minima of the gap between consecutive same-l levels, located by a three-point parabola
/// through gap^2 (exact for a two-level avoided crossing).
inline std::vector<CrossingEvent> detect_events(const FlowTable& flow, const EventOptions& opt = {}) {
  std::vector<CrossingEvent> events;
  const auto& B = flow.fields;
  const std::size_t nf = B.size();
  if (nf < 3) return events;
  const std::size_t nl = flow.l_values.size();

  for (std::size_t la = 0; la < nl; ++la) {
    for (std::size_t lb = la + 1; lb < nl; ++lb) {
      for (int ba = 0; ba < flow.n_count; ++ba) {
        for (int bb = 0; bb < flow.n_count; ++bb) {
          if (ba != bb && !opt.include_cross_ring) continue;
          for (std::size_t f = 0; f + 1 < nf; ++f) {
            const auto& a0 = flow.at(f, la, ba);
            const auto& b0 = flow.at(f, lb, bb);
            const auto& a1 = flow.at(f + 1, la, ba);
            const auto& b1 = flow.at(f + 1, lb, bb);
            const double d0 = a0.energy - b0.energy, d1 = a1.energy - b1.energy;
            if ((d0 < 0.0) == (d1 < 0.0) || d0 == d1) continue;
            CrossingEvent e;
            e.kind = EventKind::crossing;
            e.field = B[f] + (B[f + 1] - B[f]) * d0 / (d0 - d1);
            e.gap = 0.0;
            e.first = {ba + 1, a0.l, a0.p, a1.p};
            e.second = {bb + 1, b0.l, b0.p, b1.p};
            events.push_back(e);
          }
        }
      }
    }
  }

  for (std::size_t li = 0; li < nl; ++li) {
    for (int s = 0; s + 1 < flow.n_count; ++s) {
      std::vector<double> gap(nf);
      for (std::size_t f = 0; f < nf; ++f) {
        const auto e = flow.sorted_energies(f, li);
        gap[f] = e[static_cast<std::size_t>(s) + 1] - e[static_cast<std::size_t>(s)];
      }
      for (std::size_t f = 1; f + 1 < nf; ++f) {
        if (!(gap[f] < gap[f - 1] && gap[f] <= gap[f + 1])) continue;
        const auto [b_star, gap_min] = detail::gap_minimum(B[f - 1], B[f], B[f + 1], gap[f - 1], gap[f], gap[f + 1]);
        // branches on the two levels at the minimum sample
        int lower = -1, upper = -1;
        const auto e = flow.sorted_energies(f, li);
        for (int br = 0; br < flow.n_count; ++br) {
          const double en = flow.at(f, li, br).energy;
          if (lower < 0 && en == e[static_cast<std::size_t>(s)]) {
            lower = br;
          } else if (upper < 0 && en == e[static_cast<std::size_t>(s) + 1]) {
            upper = br;
          }
        }
        if (lower < 0 || upper < 0) continue;
        std::size_t f_before = 0, f_after = nf - 1;
        for (std::size_t k = 0; k < nf; ++k) {
          if (B[k] <= b_star - opt.context + 1e-9) f_before = k;
        }
        for (std::size_t k = nf; k-- > 0;) {
          if (B[k] >= b_star + opt.context - 1e-9) f_after = k;
        }
        CrossingEvent ev;
        ev.kind = EventKind::anti_crossing;
        ev.field = b_star;
        ev.gap = gap_min;
        const int l = flow.l_values[li];
        ev.first = {lower + 1, l, flow.at(f_before, li, lower).p, flow.at(f_after, li, lower).p};
        ev.second = {upper + 1, l, flow.at(f_before, li, upper).p, flow.at(f_after, li, upper).p};
        events.push_back(ev);
      }
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const CrossingEvent& x, const CrossingEvent& y) { return x.field < y.field; });
  return events;
}

// --- optical transition spacings ------------------------------------------------------

struct TransitionSpacing {
  int n = 1;
  int l = 0;
  double spacing = 0.0;  // meV, relative to the reference pair
};

/// [E_e(n,l) + E_h(n,l)] - [E_e(ref) + E_h(ref)] for every electron level: confinement
/// energies only, no Coulomb term and no bulk gap.
inline std::vector<TransitionSpacing> relative_transition_spacing(const std::vector<LabeledState>& electrons,
                                                                  const std::vector<LabeledState>& holes,
                                                                  int ref_n = 1, int ref_l = 0) {
  const auto find = [](const std::vector<LabeledState>& v, int n, int l, const char* who) -> const LabeledState& {
    for (const auto& s : v) {
      if (s.n == n && s.l == l) return s;
    }
    throw std::invalid_argument(std::string("missing ") + who + " state (" + std::to_string(n) + "," + std::to_string(l) + ")");
  };
  const double ref = find(electrons, ref_n, ref_l, "electron").energy + find(holes, ref_n, ref_l, "hole").energy;
  std::vector<TransitionSpacing> out;
  for (const auto& e : electrons) {
    out.push_back({e.n, e.l, e.energy + find(holes, e.n, e.l, "hole").energy - ref});
  }
  return out;
}

}  // namespace dcqr
