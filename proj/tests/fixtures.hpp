#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include "dcqr/dcqr.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return DCQR_TEST_DATA_DIR; }

/// A compact two-ring electron device, cheap enough for a 1 nm grid.
inline dcqr::DeviceSpec two_rings() { return dcqr::load_device(data_dir() / "two_rings.conf"); }

inline dcqr::DeviceSpec parse_device_text(const std::string& text) {
  std::istringstream in(text);
  return dcqr::parse_device(dcqr::KeyValueFile::parse(in, "<test>"));
}

inline dcqr::HamiltonianOperator two_ring_operator(double h, int l, double field) {
  const auto spec = two_rings();
  const auto grid = dcqr::build_grid_spacing(spec, h);
  return dcqr::assemble(grid, spec, dcqr::sample_mass(spec, grid, spec.material.m_well), l, field);
}

/// A fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dcqr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
