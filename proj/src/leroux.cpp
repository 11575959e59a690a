#include "strelcast/leroux.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace strelcast::model {

Eigen::SparseMatrix<double> graph_laplacian(const SpatialGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    entries.emplace_back(ii, ii, static_cast<double>(grid.degree(i)));
    for (const auto j : grid.neighbors(i)) entries.emplace_back(ii, static_cast<Eigen::Index>(j), -1.0);
  }
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(entries.begin(), entries.end());
  return L;
}

Eigen::SparseMatrix<double> leroux_precision(double rho, const SpatialGrid& grid) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("Leroux parameter rho = " + std::to_string(rho) + " outside [0, 1]");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    entries.emplace_back(ii, ii, rho * static_cast<double>(grid.degree(i)) + (1.0 - rho));
    if (rho == 0.0) continue;
    for (const auto j : grid.neighbors(i)) entries.emplace_back(ii, static_cast<Eigen::Index>(j), -rho);
  }
  Eigen::SparseMatrix<double> Q(n, n);
  Q.setFromTriplets(entries.begin(), entries.end());
  return Q;
}

LaplacianBasis::LaplacianBasis(const SpatialGrid& grid) {
  const Eigen::MatrixXd L = Eigen::MatrixXd(graph_laplacian(grid));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Laplacian eigendecomposition failed");
  // Laplacian eigenvalues are nonnegative; clamp round-off below zero.
  eigenvalues = solver.eigenvalues().cwiseMax(0.0);
  eigenvectors = solver.eigenvectors();
}

Eigen::VectorXd LaplacianBasis::precision_eigenvalues(double rho) const {
  return (rho * eigenvalues.array() + (1.0 - rho)).matrix();
}

double LaplacianBasis::log_det(double rho) const {
  return precision_eigenvalues(rho).array().log().sum();
}

}  // namespace strelcast::model
