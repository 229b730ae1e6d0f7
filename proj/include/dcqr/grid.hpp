#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dcqr/device.hpp"

namespace dcqr {

/// Uniform structured grid on [0, rho_max] x [z_min, z_max]; the axis rho = 0 is a node.
/// Nodes are addressed row-major: index = i_rho * n_z + i_z.
struct Grid {
  std::size_t n_rho = 0, n_z = 0;
  std::vector<double> rho_nodes;
  std::vector<double> z_nodes;

  double h_rho() const { return rho_nodes[1] - rho_nodes[0]; }
  double h_z() const { return z_nodes[1] - z_nodes[0]; }
  std::size_t node_count() const { return n_rho * n_z; }
  std::size_t index(std::size_t i_rho, std::size_t i_z) const { return i_rho * n_z + i_z; }

  /// Integral of rho over the radial control volume of node i (the axis node owns [0, h/2]).
  double radial_measure(std::size_t i_rho) const {
    const double h = h_rho();
    return i_rho == 0 ? 0.125 * h * h : rho_nodes[i_rho] * h;
  }

  /// rho-weighted quadrature weight of a node, w = rho * drho * dz.
  double weight(std::size_t node) const { return radial_measure(node / n_z) * h_z(); }

  std::vector<double> weights() const {
    std::vector<double> w(node_count());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = weight(k);
    return w;
  }
};

inline std::vector<double> uniform_nodes(double lo, double hi, std::size_t n) {
  std::vector<double> nodes(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + h * static_cast<double>(i);
  nodes.back() = hi;
  return nodes;
}

inline Grid build_grid(double rho_max, double z_min, double z_max, std::size_t n_rho, std::size_t n_z) {
  if (n_rho < 8 || n_z < 8) throw std::invalid_argument("grid needs at least 8 nodes per direction");
  if (!(rho_max > 0.0) || !(z_max > z_min) || !std::isfinite(rho_max) || !std::isfinite(z_max - z_min)) {
    throw std::invalid_argument("degenerate grid box");
  }
  Grid g;
  g.n_rho = n_rho;
  g.n_z = n_z;
  g.rho_nodes = uniform_nodes(0.0, rho_max, n_rho);
  g.z_nodes = uniform_nodes(z_min, z_max, n_z);
  return g;
}

inline Grid build_grid(const DeviceSpec& spec, std::size_t n_rho, std::size_t n_z) {
  return build_grid(spec.box_rho_max, spec.box_z_min, spec.box_z_max, n_rho, n_z);
}

/// Grid whose spacing is the requested one (rounded so the box is covered exactly).
inline Grid build_grid_spacing(const DeviceSpec& spec, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const auto count = [spacing](double span) {
    return static_cast<std::size_t>(std::llround(span / spacing)) + 1;
  };
  return build_grid(spec, count(spec.box_rho_max), count(spec.box_z_max - spec.box_z_min));
}

}  // namespace dcqr
