#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dcqr/constants.hpp"
#include "dcqr/device.hpp"
#include "dcqr/grid.hpp"

namespace dcqr {

/// Effective mass (units of m0) on every grid node, boundary nodes included.
struct MassField {
  std::vector<double> values;
};

/// Fraction of each node's control volume (rho-weighted) that lies inside a ring.
inline std::vector<double> ring_fraction(const DeviceSpec& spec, const Grid& grid) {
  const double hr = grid.h_rho(), hz = grid.h_z();
  std::vector<double> frac(grid.node_count(), 0.0);
  for (std::size_t i = 0; i < grid.n_rho; ++i) {
    const double rho = grid.rho_nodes[i];
    const double r_lo = std::max(0.0, rho - 0.5 * hr), r_hi = rho + 0.5 * hr;
    const double measure = grid.radial_measure(i);
    for (std::size_t j = 0; j < grid.n_z; ++j) {
      const double z = grid.z_nodes[j];
      const double z_lo = z - 0.5 * hz, z_hi = z + 0.5 * hz;
      double f = 0.0;
      for (const auto& reg : spec.regions) {
        double fr = 0.0, fz = 0.0;
        if (r_lo >= reg.rho_min && r_hi <= reg.rho_max) {
          fr = 1.0;
        } else {
          const double a = std::max(r_lo, reg.rho_min), b = std::min(r_hi, reg.rho_max);
          if (b > a) fr = 0.5 * (b * b - a * a) / measure;
        }
        if (z_lo >= reg.z_min && z_hi <= reg.z_max) {
          fz = 1.0;
        } else {
          const double a = std::max(z_lo, reg.z_min), b = std::min(z_hi, reg.z_max);
          if (b > a) fz = (b - a) / hz;
        }
        f += fr * fz;
      }
      frac[grid.index(i, j)] = std::clamp(f, 0.0, 1.0);
    }
  }
  return frac;
}

/// Ring nodes get `well_mass`, substrate nodes the bulk barrier mass. Nodes whose
/// control volume straddles an interface get the volume-weighted harmonic blend.
inline MassField sample_mass(const DeviceSpec& spec, const Grid& grid, double well_mass) {
  const double barrier = spec.material.m_barrier;
  const auto frac = ring_fraction(spec, grid);
  MassField field;
  field.values.resize(frac.size());
  for (std::size_t k = 0; k < frac.size(); ++k) {
    const double f = frac[k];
    if (f == 1.0) {
      field.values[k] = well_mass;
    } else if (f == 0.0) {
      field.values[k] = barrier;
    } else {
      field.values[k] = 1.0 / (f / well_mass + (1.0 - f) / barrier);
    }
  }
  return field;
}

/// Discretized envelope Hamiltonian for one (l, B), in the symmetric standard form
/// A = W^{-1/2} K W^{-1/2}, where K is the weak-form stiffness matrix and W the diagonal
/// rho-weighted measure. Eigenvectors y of A map to envelopes Phi = W^{-1/2} y.
struct HamiltonianOperator {
  Eigen::SparseMatrix<double> matrix;   // meV
  std::vector<double> weights;          // per unknown, rho * drho * dz
  std::vector<std::size_t> dof_nodes;   // grid node carried by each unknown
  std::size_t node_count = 0;
  int l = 0;
  double field = 0.0;                   // T
  double spectrum_floor = 0.0;          // strict lower bound on every eigenvalue (meV)

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }

  /// Wraps an arbitrary symmetric matrix; unknowns map one-to-one onto nodes.
  static HamiltonianOperator from_matrix(Eigen::SparseMatrix<double> m, std::vector<double> w = {}) {
    if (m.rows() != m.cols()) throw std::invalid_argument("operator matrix must be square");
    const Eigen::SparseMatrix<double> t = m.transpose();
    if ((m - t).norm() != 0.0) throw std::invalid_argument("operator matrix must be symmetric");
    HamiltonianOperator op;
    const auto n = static_cast<std::size_t>(m.rows());
    op.weights = w.empty() ? std::vector<double>(n, 1.0) : std::move(w);
    if (op.weights.size() != n) throw std::invalid_argument("weight vector size mismatch");
    op.dof_nodes.resize(n);
    for (std::size_t k = 0; k < n; ++k) op.dof_nodes[k] = k;
    op.node_count = n;
    // Gershgorin
    double floor = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
      double diag = 0.0, off = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) {
        if (it.row() == it.col()) {
          diag = it.value();
        } else {
          off += std::abs(it.value());
        }
      }
      floor = std::min(floor, diag - off);
    }
    op.spectrum_floor = n == 0 ? 0.0 : floor - 1.0;
    op.matrix = std::move(m);
    return op;
  }
};

/// Assembles the axisymmetric effective-mass Hamiltonian for orbital number l in a field B.
///
/// Finite-volume form of
///   int (hbar^2/2m*) (|d_rho Phi|^2 + |d_z Phi|^2 + l^2 Phi^2/rho^2) rho drho dz
///   + int [V_c + hbar l e B/(2m*) + e^2 B^2 rho^2/(8m*)] Phi^2 rho drho dz
/// with 1/m* harmonically averaged on cell faces (flux continuity across interfaces).
/// Box walls are Dirichlet; the axis is a Neumann boundary for l = 0 and Dirichlet otherwise.
/// The cyclotron terms use the local node mass.
inline HamiltonianOperator assemble(const Grid& grid, const DeviceSpec& spec, const MassField& mass, int l,
                                    double field) {
  if (mass.values.size() != grid.node_count()) throw std::invalid_argument("mass field does not match grid");
  const auto& pc = kConstants;
  const auto& m = mass.values;
  const std::size_t nr = grid.n_rho, nz = grid.n_z;
  const std::size_t i0 = l == 0 ? 0 : 1;
  const double hr = grid.h_rho(), hz = grid.h_z();

  HamiltonianOperator op;
  op.l = l;
  op.field = field;
  op.node_count = grid.node_count();

  std::vector<long> dof_of(grid.node_count(), -1);
  for (std::size_t i = i0; i + 1 < nr; ++i) {
    for (std::size_t j = 1; j + 1 < nz; ++j) {
      const auto node = grid.index(i, j);
      dof_of[node] = static_cast<long>(op.dof_nodes.size());
      op.dof_nodes.push_back(node);
      op.weights.push_back(grid.weight(node));
    }
  }
  const std::size_t n = op.dof_nodes.size();
  std::vector<double> kdiag(n, 0.0);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(5 * n);

  const auto couple = [&](std::size_t a, std::size_t b, double t) {
    const long da = dof_of[a], db = dof_of[b];
    if (da >= 0) kdiag[static_cast<std::size_t>(da)] += t;
    if (db >= 0) kdiag[static_cast<std::size_t>(db)] += t;
    if (da >= 0 && db >= 0) {
      const double v = -t / std::sqrt(op.weights[static_cast<std::size_t>(da)] * op.weights[static_cast<std::size_t>(db)]);
      entries.emplace_back(da, db, v);
      entries.emplace_back(db, da, v);
    }
  };
  const auto face_inv_mass = [&](std::size_t a, std::size_t b) { return 2.0 / (m[a] + m[b]); };

  // radial faces
  for (std::size_t i = 0; i + 1 < nr; ++i) {
    const double rho_face = (static_cast<double>(i) + 0.5) * hr;
    for (std::size_t j = 1; j + 1 < nz; ++j) {
      const auto a = grid.index(i, j), b = grid.index(i + 1, j);
      if (dof_of[a] < 0 && dof_of[b] < 0) continue;
      couple(a, b, pc.hbar2_over_2m0 * face_inv_mass(a, b) * rho_face * hz / hr);
    }
  }
  // axial faces
  for (std::size_t i = i0; i + 1 < nr; ++i) {
    const double area = grid.radial_measure(i);
    for (std::size_t j = 0; j + 1 < nz; ++j) {
      const auto a = grid.index(i, j), b = grid.index(i, j + 1);
      couple(a, b, pc.hbar2_over_2m0 * face_inv_mass(a, b) * area / hz);
    }
  }

  const auto frac = ring_fraction(spec, grid);
  const double zeeman_k = 2.0 * kPi * field / pc.flux_quantum;   // eB/hbar, 1/nm^2
  const double dia_k = kPi * field / pc.flux_quantum;            // eB/(2 hbar), 1/nm^2
  const double l2 = static_cast<double>(l) * static_cast<double>(l);
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < n; ++d) {
    const auto node = op.dof_nodes[d];
    const std::size_t i = node / nz;
    const double rho = grid.rho_nodes[i];
    const double c = pc.hbar2_over_2m0 / m[node];
    double centrifugal = 0.0;
    if (l != 0) {
      centrifugal = c * l2 * std::log((rho + 0.5 * hr) / (rho - 0.5 * hr)) / grid.radial_measure(i);
    }
    const double potential = (1.0 - frac[node]) * spec.material.band_offset;
    const double zeeman = c * static_cast<double>(l) * zeeman_k;
    const double dia = c * (dia_k * rho) * (dia_k * rho);
    const double local = potential + centrifugal + zeeman + dia;
    floor = std::min(floor, local);
    entries.emplace_back(d, d, kdiag[d] / op.weights[d] + local);
  }
  op.spectrum_floor = floor - 1.0;

  op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  return op;
}

/// Writes the operator matrix in MatrixMarket coordinate format (1-based row, col, value).
inline void write_matrix_market(const HamiltonianOperator& op, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% l = " << op.l << ", B = " << op.field << " T, units meV\n";
  out << op.matrix.rows() << ' ' << op.matrix.cols() << ' ' << op.matrix.nonZeros() << '\n';
  char buf[64];
  for (Eigen::Index c = 0; c < op.matrix.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
  }
}

}  // namespace dcqr
