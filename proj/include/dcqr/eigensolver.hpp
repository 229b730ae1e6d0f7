#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcqr/hamiltonian.hpp"

namespace dcqr {

/// One eigenpair. `envelope` holds Phi on every grid node (zero on Dirichlet nodes) and
/// is normalized so that sum_i w_i Phi_i^2 = 1.
struct EigenState {
  double energy = 0.0;  // meV
  std::vector<double> envelope;
  int l = 0;
  double field = 0.0;  // T
};

/// The iterative solver did not reach the requested residual.
class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct EigenOptions {
  double tol = 1e-9;      // relative residual: ||A y - E y|| <= tol (|E| + 1 meV)
  int max_restarts = 100;
  int basis_size = 0;     // 0 selects max(3k + 30, 50)
};

namespace detail {

/// Deterministic start vector in (0.5, 1.5); splitmix64 on the index.
inline Eigen::VectorXd start_vector(Eigen::Index n, std::uint64_t stream) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint64_t x = static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    v[i] = 0.5 + static_cast<double>(x >> 11) * 0x1.0p-53;
  }
  return v;
}

/// Orthogonalizes w against the first `cols` columns of V (classical Gram-Schmidt, twice).
inline double orthogonalize(const Eigen::MatrixXd& V, Eigen::Index cols, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) break;
    const Eigen::VectorXd coeff = V.leftCols(cols).transpose() * w;
    w.noalias() -= V.leftCols(cols) * coeff;
  }
  return w.norm();
}

inline EigenState to_state(const HamiltonianOperator& op, const Eigen::VectorXd& y, double energy) {
  EigenState s;
  s.energy = energy;
  s.l = op.l;
  s.field = op.field;
  s.envelope.assign(op.node_count, 0.0);
  std::size_t arg = 0;
  double big = -1.0;
  for (std::size_t d = 0; d < op.dof_nodes.size(); ++d) {
    const double v = y[static_cast<Eigen::Index>(d)] / std::sqrt(op.weights[d]);
    s.envelope[op.dof_nodes[d]] = v;
    if (std::abs(v) > big) {
      big = std::abs(v);
      arg = op.dof_nodes[d];
    }
  }
  // sign convention: the largest-magnitude envelope value is positive
  if (s.envelope[arg] < 0.0) {
    for (auto& v : s.envelope) v = -v;
  }
  return s;
}

}  // namespace detail

/// The k lowest eigenpairs, ascending in energy.
///
/// Thick-restart Lanczos on the shift-inverted operator (A - sigma)^{-1}, with sigma just
/// below the operator's diagonal lower bound so the shifted matrix is positive definite.
/// Basis vectors are fully reorthogonalized and the start vector is fixed, so repeated
/// calls are bit-for-bit reproducible.
inline std::vector<EigenState> lowest_eigenpairs(const HamiltonianOperator& op, int k, EigenOptions opt = {}) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (k < 1 || k > n) throw std::invalid_argument("lowest_eigenpairs: need 1 <= k <= dimension");
  const auto& A = op.matrix;
  const double sigma = op.spectrum_floor;

  Eigen::SparseMatrix<double> shifted = A;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success) throw EigenSolveError("factorization of shifted operator failed", INFINITY);

  const Eigen::Index m = std::min<Eigen::Index>(n, opt.basis_size > 0 ? opt.basis_size : std::max(3 * k + 30, 50));
  const Eigen::Index keep = std::min<Eigen::Index>(m - 1, k + 10);

  Eigen::MatrixXd V(n, m + 1), OpV(n, m);
  std::uint64_t stream = 0;
  Eigen::VectorXd v = detail::start_vector(n, stream++);
  V.col(0) = v / v.norm();
  Eigen::Index cols = 0;       // columns with Op applied
  bool have_next = true;        // V.col(cols) is a valid pending vector
  double worst = INFINITY;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (cols < m && have_next) {
      OpV.col(cols) = factor.solve(V.col(cols));
      ++cols;
      if (cols == n) {
        have_next = false;
        break;
      }
      Eigen::VectorXd w = OpV.col(cols - 1);
      const double scale = w.norm();
      double norm = detail::orthogonalize(V, cols, w);
      while (norm <= 1e-10 * scale) {
        // invariant subspace; continue with a fresh direction
        w = detail::start_vector(n, stream++);
        norm = detail::orthogonalize(V, cols, w);
      }
      V.col(cols) = w / norm;
    }

    Eigen::MatrixXd T = V.leftCols(cols).transpose() * OpV.leftCols(cols);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
    // largest theta <-> lowest energy; eigenvalues come ascending
    const Eigen::Index take = std::min<Eigen::Index>(cols, std::max<Eigen::Index>(keep, k));
    Eigen::MatrixXd S = small.eigenvectors().rightCols(take).rowwise().reverse();
    Eigen::VectorXd theta = small.eigenvalues().tail(take).reverse();

    Eigen::MatrixXd Y = V.leftCols(cols) * S;
    worst = 0.0;
    std::vector<double> energies(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const double lambda = sigma + 1.0 / theta[j];
      energies[static_cast<std::size_t>(j)] = lambda;
      const Eigen::VectorXd y = Y.col(j) / Y.col(j).norm();
      const double res = (A * y - lambda * y).norm() / (std::abs(lambda) + 1.0);
      worst = std::max(worst, res);
    }
    if (worst <= opt.tol || !have_next) {
      std::vector<EigenState> out;
      out.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd y = Y.col(j) / Y.col(j).norm();
        out.push_back(detail::to_state(op, y, energies[static_cast<std::size_t>(j)]));
      }
      if (worst > opt.tol && worst > 1e-6) {
        throw EigenSolveError("eigensolver exhausted the search space without converging", worst);
      }
      return out;
    }

    // thick restart: keep the leading Ritz vectors plus the pending Krylov direction
    const Eigen::Index kept = std::min(keep, take);
    Eigen::MatrixXd OpY = OpV.leftCols(cols) * S.leftCols(kept);
    const Eigen::VectorXd pending = V.col(cols);
    V.leftCols(kept) = Y.leftCols(kept);
    OpV.leftCols(kept) = OpY;
    cols = kept;
    Eigen::VectorXd w = pending;
    const double norm = detail::orthogonalize(V, cols, w);
    V.col(cols) = w / norm;
  }
  throw EigenSolveError("eigensolver did not converge within the restart limit", worst);
}

/// Full spectrum of a small operator via a dense symmetric solve (verification oracle).
inline std::vector<double> dense_all_eigenvalues(const HamiltonianOperator& op) {
  constexpr std::size_t kMaxDense = 5000;
  if (op.size() > kMaxDense) throw std::invalid_argument("dense_all_eigenvalues: dimension exceeds 5000");
  const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigenSolveError("dense eigensolver failed", INFINITY);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// rho-weighted inner product of two envelopes on the same grid.
inline double weighted_overlap(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += grid.weight(k) * a[k] * b[k];
  return s;
}

}  // namespace dcqr
