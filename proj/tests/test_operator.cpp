#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"

using namespace dcqr;

TEST_CASE("assembled operator is exactly symmetric", "[operator]") {
  for (const int l : {0, -1, 2}) {
    for (const double b : {0.0, 3.0, 7.0}) {
      const auto op = fixtures::two_ring_operator(1.0, l, b);
      const Eigen::SparseMatrix<double> t = op.matrix.transpose();
      CHECK((op.matrix - t).norm() == 0.0);
    }
  }
}

TEST_CASE("unknown layout follows the boundary conditions", "[operator]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  const auto op0 = fixtures::two_ring_operator(1.0, 0, 0.0);
  const auto op1 = fixtures::two_ring_operator(1.0, 1, 0.0);
  // walls are always excluded; the axis column is kept only for l = 0
  CHECK(op0.size() == (g.n_rho - 1) * (g.n_z - 2));
  CHECK(op1.size() == (g.n_rho - 2) * (g.n_z - 2));
  CHECK(op0.weights.size() == op0.size());
  CHECK(op0.dof_nodes.front() == g.index(0, 1));
  CHECK(op1.dof_nodes.front() == g.index(1, 1));
}

TEST_CASE("reversing both l and B leaves the operator unchanged", "[operator]") {
  const auto a = fixtures::two_ring_operator(1.0, -1, 5.0);
  const auto b = fixtures::two_ring_operator(1.0, 1, -5.0);
  CHECK((a.matrix - b.matrix).norm() == 0.0);
}

TEST_CASE("for l = 0 the field only adds the diamagnetic diagonal", "[operator]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  const auto mass = sample_mass(spec, g, spec.material.m_well);
  const double b = 4.0;
  const auto a0 = assemble(g, spec, mass, 0, 0.0);
  const auto ab = assemble(g, spec, mass, 0, b);
  const Eigen::SparseMatrix<double> diff = ab.matrix - a0.matrix;
  double worst = 0.0;
  for (Eigen::Index c = 0; c < diff.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, c); it; ++it) {
      if (it.row() != it.col()) {
        worst = std::max(worst, std::abs(it.value()));
        continue;
      }
      const auto node = a0.dof_nodes[static_cast<std::size_t>(it.row())];
      const double rho = g.rho_nodes[node / g.n_z];
      const double k = kPi * b * rho / kConstants.flux_quantum;
      const double expected = kConstants.hbar2_over_2m0 / mass.values[node] * k * k;
      CHECK(it.value() == Catch::Approx(expected).epsilon(1e-9).margin(1e-12));
    }
  }
  CHECK(worst == 0.0);
}

TEST_CASE("spectrum floor bounds every eigenvalue from below", "[operator]") {
  for (const int l : {0, -2}) {
    const auto op = fixtures::two_ring_operator(2.0, l, 6.0);
    const auto all = dense_all_eigenvalues(op);
    CHECK(all.front() > op.spectrum_floor);
  }
}

TEST_CASE("l = 0 levels never decrease with field", "[operator]") {
  double prev1 = -1e300, prev2 = -1e300;
  for (const double b : {0.0, 1.0, 2.5, 4.0, 7.0}) {
    const auto st = lowest_eigenpairs(fixtures::two_ring_operator(1.0, 0, b), 2);
    CHECK(st[0].energy >= prev1);
    CHECK(st[1].energy >= prev2);
    prev1 = st[0].energy;
    prev2 = st[1].energy;
  }
}

TEST_CASE("ring fraction is one deep inside a ring and zero in the barrier", "[operator]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  const auto f = ring_fraction(spec, g);
  CHECK(f[g.index(12, 12)] == 1.0);   // rho 12, z 2
  CHECK(f[g.index(40, 12)] == 0.0);   // rho 40
  CHECK(f[g.index(12, 2)] == 0.0);    // z -8
  const auto m = sample_mass(spec, g, 0.07);
  CHECK(m.values[g.index(12, 12)] == 0.07);
  CHECK(m.values[g.index(40, 12)] == spec.material.m_barrier);
}

TEST_CASE("wrapping a non-symmetric matrix is rejected", "[operator]") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 1) = 1.0;
  CHECK_THROWS_AS(HamiltonianOperator::from_matrix(m), std::invalid_argument);
}

TEST_CASE("matrix market export", "[operator]") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 0) = 1.0;
  m.insert(1, 1) = 3.0;
  std::ostringstream out;
  write_matrix_market(HamiltonianOperator::from_matrix(m), out);
  const auto text = out.str();
  CHECK(text.rfind("%%MatrixMarket matrix coordinate real general\n", 0) == 0);
  CHECK(text.find("\n2 2 2\n") != std::string::npos);
  CHECK(text.find("\n2 2 3\n") != std::string::npos);
}
