#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

#include "plap/discrete_operator.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"

namespace plap {

/// Solves A x = r for a symmetric positive definite cyclic tridiagonal A.
///
/// Sherman-Morrison: A = B + gamma v v^T with gamma = -diag[0] < 0, so B = A + |gamma| v v^T stays
/// positive definite and plain Thomas elimination on B needs no pivoting.
inline DiscreteField solve_spd_cyclic(const CyclicTridiagonal& a, const DiscreteField& rhs) {
  const std::size_t n = a.size();
  const double gamma = -a.diag[0];
  const double corner = a.off[n - 1];

  std::vector<double> b = a.diag;
  b[0] -= gamma;
  b[n - 1] -= corner * corner / gamma;

  // Thomas factorization of B (sub- and super-diagonal are off[0..n-2]).
  std::vector<double> c(n), d(n);
  d[0] = b[0];
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = a.off[i - 1] / d[i - 1];
    d[i] = b[i] - c[i - 1] * a.off[i - 1];
    if (!(std::fabs(d[i]) > 0.0)) throw NoConvergence("cyclic tridiagonal system is singular");
  }
  auto solve_b = [&](std::vector<double> y) {
    for (std::size_t i = 1; i < n; ++i) y[i] -= c[i - 1] * y[i - 1];
    y[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = y[i] / d[i] - c[i] * y[i + 1];
    return y;
  };

  std::vector<double> uvec(n, 0.0);
  uvec[0] = gamma;
  uvec[n - 1] = corner;
  const std::vector<double> x = solve_b(rhs.vector());
  const std::vector<double> z = solve_b(uvec);
  const double vx = x[0] + corner / gamma * x[n - 1];
  const double vz = z[0] + corner / gamma * z[n - 1];
  const double factor = vx / (1.0 + vz);
  DiscreteField out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - factor * z[i];
  return out;
}

/// Square system [A  B; C  D] with A cyclic tridiagonal (N x N) and k dense border columns/rows.
struct BorderedSystem {
  CyclicTridiagonal a;
  std::vector<DiscreteField> cols;            // k columns of length N
  std::vector<DiscreteField> rows;            // k rows of length N
  std::vector<std::vector<double>> corner;    // k x k

  std::size_t borders() const noexcept { return cols.size(); }
};

struct BorderedSolution {
  DiscreteField main;
  std::vector<double> extra;
};

/// Direct sparse LU solve of a bordered system; handles indefinite and nearly singular A.
inline BorderedSolution solve_bordered(const BorderedSystem& sys, const DiscreteField& rhs_main,
                                       const std::vector<double>& rhs_extra) {
  const std::size_t n = sys.a.size();
  const std::size_t k = sys.borders();
  const auto dim = static_cast<Eigen::Index>(n + k);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * n + 2 * k * n + k * k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto ip = static_cast<Eigen::Index>(i + 1 == n ? 0 : i + 1);
    trips.emplace_back(ii, ii, sys.a.diag[i]);
    trips.emplace_back(ii, ip, sys.a.off[i]);
    trips.emplace_back(ip, ii, sys.a.off[i]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(n + j);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (sys.cols[j][i] != 0.0) trips.emplace_back(ii, jj, sys.cols[j][i]);
      if (sys.rows[j][i] != 0.0) trips.emplace_back(jj, ii, sys.rows[j][i]);
    }
    for (std::size_t l = 0; l < k; ++l) {
      trips.emplace_back(jj, static_cast<Eigen::Index>(n + l), sys.corner[j][l]);
    }
  }
  Eigen::SparseMatrix<double> mat(dim, dim);
  mat.setFromTriplets(trips.begin(), trips.end());
  mat.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success) throw NoConvergence("bordered system is singular");

  Eigen::VectorXd b(dim);
  for (std::size_t i = 0; i < n; ++i) b[static_cast<Eigen::Index>(i)] = rhs_main[i];
  for (std::size_t j = 0; j < k; ++j) b[static_cast<Eigen::Index>(n + j)] = rhs_extra[j];
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw NoConvergence("bordered solve failed");

  BorderedSolution out{DiscreteField(n), std::vector<double>(k)};
  for (std::size_t i = 0; i < n; ++i) out.main[i] = x[static_cast<Eigen::Index>(i)];
  for (std::size_t j = 0; j < k; ++j) out.extra[j] = x[static_cast<Eigen::Index>(n + j)];
  return out;
}

}  // namespace plap
