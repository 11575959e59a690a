#pragma once

#include "strelcast/spatial.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace strelcast::model {

/// Q(ρ) = ρ (diag(W1) - W) + (1 - ρ) I. Throws std::invalid_argument unless 0 <= ρ <= 1.
Eigen::SparseMatrix<double> leroux_precision(double rho, const SpatialGrid& grid);

/// Graph Laplacian diag(W1) - W.
Eigen::SparseMatrix<double> graph_laplacian(const SpatialGrid& grid);

/// Eigendecomposition L = V diag(λ) Vᵀ of the graph Laplacian. Since
/// Q(ρ) = V diag(ρλ + 1 - ρ) Vᵀ for every ρ, one decomposition serves all ρ.
struct LaplacianBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  explicit LaplacianBasis(const SpatialGrid& grid);

  /// Eigenvalues ρλ_k + 1 - ρ of Q(ρ).
  [[nodiscard]] Eigen::VectorXd precision_eigenvalues(double rho) const;

  /// log det Q(ρ).
  [[nodiscard]] double log_det(double rho) const;
};

}  // namespace strelcast::model
