#pragma once

#include <algorithm>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcqr/config.hpp"

#ifndef DCQR_CONFIG_DIR
#define DCQR_CONFIG_DIR "configs"
#endif

namespace dcqr {

enum class Particle { electron, heavy_hole };

/// Where a point lies. `barrier` is only ever a query result, never a region label.
enum class RegionLabel { inner, outer, barrier };

inline std::string to_string(Particle p) { return p == Particle::electron ? "electron" : "heavy_hole"; }

inline std::string to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::inner: return "inner";
    case RegionLabel::outer: return "outer";
    case RegionLabel::barrier: return "barrier";
  }
  return "?";
}

inline Particle parse_particle(std::string_view s) {
  if (s == "electron") return Particle::electron;
  if (s == "heavy_hole" || s == "hole") return Particle::heavy_hole;
  throw ConfigError("unknown particle '" + std::string(s) + "'");
}

/// Bulk band parameters of the ring (well) and substrate (barrier) materials.
struct MaterialParams {
  double m_well = 0.0;       // m0
  double m_barrier = 0.0;    // m0
  double band_offset = 0.0;  // meV

  /// GaAs rings in Al(0.70)Ga(0.30)As, conduction band.
  static MaterialParams electron() { return {0.067, 0.093, 262.0}; }
  /// Same heterostructure, heavy-hole band.
  static MaterialParams heavy_hole() { return {0.51, 0.57, 195.0}; }
  static MaterialParams preset(Particle p) { return p == Particle::electron ? electron() : heavy_hole(); }

  void validate() const {
    if (!(m_well > 0.0) || !(m_well <= m_barrier)) {
      throw ConfigError("material masses must satisfy 0 < m_well <= m_barrier");
    }
    if (!(band_offset > 0.0)) throw ConfigError("band_offset must be positive");
  }
};

/// Axis-aligned rectangular ring cross-section in the (rho, z) half-plane.
/// Membership is closed on every side: rho_min <= rho <= rho_max, z_min <= z <= z_max.
struct RingRegion {
  RegionLabel label = RegionLabel::inner;
  double rho_min = 0.0, rho_max = 0.0;
  double z_min = 0.0, z_max = 0.0;

  bool contains(double rho, double z) const {
    return rho >= rho_min && rho <= rho_max && z >= z_min && z <= z_max;
  }
  bool overlaps(const RingRegion& o) const {
    return rho_min < o.rho_max && o.rho_min < rho_max && z_min < o.z_max && o.z_min < z_max;
  }
  bool operator==(const RingRegion&) const = default;
};

struct DeviceSpec {
  Particle particle = Particle::electron;
  MaterialParams material = MaterialParams::electron();
  std::vector<RingRegion> regions;
  double box_rho_max = 0.0;
  double box_z_min = 0.0, box_z_max = 0.0;

  static constexpr double kMinPadding = 10.0;  // nm of barrier between any ring and the box wall

  void validate() const {
    material.validate();
    if (!(box_rho_max > 0.0) || !(box_z_max > box_z_min)) throw ConfigError("degenerate computational box");
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const auto& r = regions[i];
      if (r.label == RegionLabel::barrier) throw ConfigError("region label must be inner or outer");
      if (!(r.rho_min >= 0.0) || !(r.rho_min < r.rho_max) || !(r.z_min < r.z_max)) {
        throw ConfigError("region " + std::to_string(i) + " has an empty or inverted extent");
      }
      if (r.rho_max + kMinPadding > box_rho_max || r.z_min - kMinPadding < box_z_min ||
          r.z_max + kMinPadding > box_z_max) {
        throw ConfigError("region " + std::to_string(i) + " needs 10 nm of barrier padding inside the box");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (regions[j].label != r.label && regions[j].overlaps(r)) {
          throw ConfigError("inner and outer regions overlap");
        }
      }
    }
  }
};

inline RegionLabel region_of(const DeviceSpec& spec, double rho, double z) {
  for (const auto& r : spec.regions) {
    if (r.contains(rho, z)) return r.label;
  }
  return RegionLabel::barrier;
}

/// Confinement potential (meV): zero inside any ring, the band offset elsewhere.
inline double potential_at(const DeviceSpec& spec, double rho, double z) {
  return region_of(spec, rho, z) == RegionLabel::barrier ? spec.material.band_offset : 0.0;
}

/// Radius separating the inner ring's side from the outer ring's side: the midpoint
/// between the facing walls of the two rings.
inline double inner_outer_divider(const DeviceSpec& spec) {
  double inner_max = -std::numeric_limits<double>::infinity();
  double outer_min = std::numeric_limits<double>::infinity();
  for (const auto& r : spec.regions) {
    if (r.label == RegionLabel::inner) inner_max = std::max(inner_max, r.rho_max);
    if (r.label == RegionLabel::outer) outer_min = std::min(outer_min, r.rho_min);
  }
  if (inner_max == -std::numeric_limits<double>::infinity()) return 0.0;
  if (outer_min == std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return 0.5 * (inner_max + outer_min);
}

/// Device file schema (one `key = value` per line):
///   particle    = electron | heavy_hole
///   m_well, m_barrier, band_offset   (optional; default to the particle's preset)
///   box_rho_max, box_z_min, box_z_max
///   region      = <inner|outer> rho_min rho_max z_min z_max   (repeatable)
inline DeviceSpec parse_device(const KeyValueFile& file) {
  DeviceSpec spec;
  bool have_particle = false;
  std::optional<double> m_well, m_barrier, offset;
  bool have_rho = false, have_zmin = false, have_zmax = false;
  for (const auto& e : file.entries()) {
    const auto where = file.where(e);
    try {
      if (e.key == "particle") {
        spec.particle = parse_particle(e.value);
        have_particle = true;
      } else if (e.key == "m_well") {
        m_well = detail::parse_double(e.value, e.key);
      } else if (e.key == "m_barrier") {
        m_barrier = detail::parse_double(e.value, e.key);
      } else if (e.key == "band_offset") {
        offset = detail::parse_double(e.value, e.key);
      } else if (e.key == "box_rho_max") {
        spec.box_rho_max = detail::parse_double(e.value, e.key);
        have_rho = true;
      } else if (e.key == "box_z_min") {
        spec.box_z_min = detail::parse_double(e.value, e.key);
        have_zmin = true;
      } else if (e.key == "box_z_max") {
        spec.box_z_max = detail::parse_double(e.value, e.key);
        have_zmax = true;
      } else if (e.key == "region") {
        const auto tok = detail::split_ws(e.value);
        if (tok.size() != 5) throw ConfigError("region expects: <inner|outer> rho_min rho_max z_min z_max");
        RingRegion r;
        if (tok[0] == "inner") {
          r.label = RegionLabel::inner;
        } else if (tok[0] == "outer") {
          r.label = RegionLabel::outer;
        } else {
          throw ConfigError("region label must be inner or outer");
        }
        r.rho_min = detail::parse_double(tok[1], "rho_min");
        r.rho_max = detail::parse_double(tok[2], "rho_max");
        r.z_min = detail::parse_double(tok[3], "z_min");
        r.z_max = detail::parse_double(tok[4], "z_max");
        spec.regions.push_back(r);
      } else {
        throw ConfigError("unknown key '" + e.key + "'");
      }
    } catch (const ConfigError& err) {
      throw ConfigError(where + ": " + err.what());
    }
  }
  if (!have_particle) throw ConfigError(file.source() + ": missing key 'particle'");
  if (!have_rho || !have_zmin || !have_zmax) throw ConfigError(file.source() + ": missing box extent");
  spec.material = MaterialParams::preset(spec.particle);
  if (m_well) spec.material.m_well = *m_well;
  if (m_barrier) spec.material.m_barrier = *m_barrier;
  if (offset) spec.material.band_offset = *offset;
  spec.validate();
  return spec;
}

inline DeviceSpec load_device(const std::filesystem::path& path) { return parse_device(KeyValueFile::load(path)); }

inline std::filesystem::path default_config_dir() { return DCQR_CONFIG_DIR; }

/// The shipped, calibrated double-ring device. The geometry is read from
/// `default_device.conf`; the material follows the requested carrier.
inline DeviceSpec default_geometry(Particle particle, const std::filesystem::path& dir = default_config_dir()) {
  auto spec = load_device(dir / "default_device.conf");
  spec.particle = particle;
  spec.material = MaterialParams::preset(particle);
  return spec;
}

}  // namespace dcqr
