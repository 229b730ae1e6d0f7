#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"

using namespace dcqr;

TEST_CASE("diagonal operator diag(1, 3)", "[eigen]") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 0) = 1.0;
  m.insert(1, 1) = 3.0;
  const auto op = HamiltonianOperator::from_matrix(m);
  const auto st = lowest_eigenpairs(op, 2);
  REQUIRE(st.size() == 2);
  CHECK(st[0].energy == Catch::Approx(1.0).margin(1e-12));
  CHECK(st[1].energy == Catch::Approx(3.0).margin(1e-12));
  CHECK(std::abs(st[0].envelope[0]) == Catch::Approx(1.0).margin(1e-12));
  CHECK(st[0].envelope[0] > 0.0);
  const auto dense = dense_all_eigenvalues(op);
  REQUIRE(dense.size() == 2);
  CHECK(dense[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(dense[1] == Catch::Approx(3.0).margin(1e-14));
}

TEST_CASE("iterative solve matches the dense solve", "[eigen]") {
  for (const int l : {0, -1}) {
    for (const double b : {0.0, 6.0}) {
      const auto op = fixtures::two_ring_operator(2.0, l, b);
      const auto it = lowest_eigenpairs(op, 6);
      const auto dense = dense_all_eigenvalues(op);
      for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(it[k].energy - dense[k]) <= 1e-8);
    }
  }
}

TEST_CASE("envelopes are orthonormal under the rho-weighted measure", "[eigen]") {
  const auto spec = fixtures::two_rings();
  const auto g = build_grid_spacing(spec, 1.0);
  const auto st = lowest_eigenpairs(fixtures::two_ring_operator(1.0, -1, 3.0), 5);
  for (std::size_t a = 0; a < st.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double s = weighted_overlap(g, st[a].envelope, st[b].envelope);
      CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) <= 1e-8);
    }
  }
}

TEST_CASE("eigenpairs are sorted, sign-fixed and reproducible", "[eigen]") {
  const auto op = fixtures::two_ring_operator(1.0, 0, 2.0);
  const auto a = lowest_eigenpairs(op, 4);
  const auto b = lowest_eigenpairs(op, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k > 0) CHECK(a[k].energy >= a[k - 1].energy);
    CHECK(a[k].energy == b[k].energy);
    CHECK(a[k].envelope == b[k].envelope);
    double big = 0.0;
    for (const double v : a[k].envelope) {
      if (std::abs(v) > std::abs(big)) big = v;
    }
    CHECK(big > 0.0);
  }
}

TEST_CASE("eigensolver argument checks", "[eigen]") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 0) = 1.0;
  m.insert(1, 1) = 3.0;
  const auto op = HamiltonianOperator::from_matrix(m);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 0), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(op, 3), std::invalid_argument);
}
