#pragma once

#include "strelcast/leroux.hpp"
#include "strelcast/random.hpp"
#include "strelcast/spatial.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace strelcast::model {

/// Parameters the latent-field full conditional depends on.
struct LatentParams {
  double xi;
  double rho;
  double tau2;
  double sigma2;
};

/// Temporal factor A_ξ of the prior precision kron(A_ξ, Q/τ²) of w (T×T, tridiagonal).
Eigen::SparseMatrix<double> ar1_precision(double xi, std::size_t n_times);

/// Full-conditional precision kron(A_ξ, Q(ρ)/τ²) + I/σ² of vec(w), stacked time-major
/// (index t * I + i).
Eigen::SparseMatrix<double> latent_posterior_precision(const SpatialGrid& grid, const LatentParams& p,
                                                       std::size_t n_times);

/**
 * Draws w | resid ~ N(P⁻¹ b, P⁻¹) with b = vec(resid) / σ².
 *
 * Q(ρ) shares eigenvectors with the graph Laplacian, so rotating space by Vᵀ splits the
 * I·T-dimensional problem into I independent tridiagonal systems of size T, each sampled
 * exactly. Systems are solved in parallel; the noise is drawn up front from `rng` so the
 * result does not depend on the thread count.
 *
 * `resid` is I×T. On return `mean_out` (if given) holds the conditional mean.
 */
Eigen::MatrixXd sample_latent_spectral(const Eigen::MatrixXd& resid, const LaplacianBasis& basis,
                                       const LatentParams& p, Rng& rng, Eigen::MatrixXd* mean_out = nullptr);

/// Single-threaded version of sample_latent_spectral with identical output.
Eigen::MatrixXd sample_latent_spectral_serial(const Eigen::MatrixXd& resid, const LaplacianBasis& basis,
                                              const LatentParams& p, Rng& rng,
                                              Eigen::MatrixXd* mean_out = nullptr);

/// Reference sampler: sparse Cholesky (AMD ordering) of the joint space-time precision.
/// Throws NumericalError if the factorization fails.
Eigen::MatrixXd sample_latent_sparse(const Eigen::MatrixXd& resid, const SpatialGrid& grid, const LatentParams& p,
                                     Rng& rng, Eigen::MatrixXd* mean_out = nullptr);

/**
 * Quadratic forms of a latent field that make the AR(1)-CAR log density O(1) in (ξ, ρ, τ²).
 * With Q = ρL + (1-ρ)I, every form xᵀQy splits into a Laplacian part and an identity part.
 */
struct LatentStats {
  std::size_t n_locations = 0;
  std::size_t n_times = 0;
  double first_L = 0, first_I = 0;  // w_1ᵀ M w_1
  double cur_L = 0, cur_I = 0;      // Σ_{t≥2} w_tᵀ M w_t
  double prev_L = 0, prev_I = 0;    // Σ_{t≥2} w_{t-1}ᵀ M w_{t-1}
  double cross_L = 0, cross_I = 0;  // Σ_{t≥2} w_tᵀ M w_{t-1}

  LatentStats() = default;
  LatentStats(const Eigen::MatrixXd& w, const Eigen::SparseMatrix<double>& laplacian);

  /// w_1ᵀQw_1 + Σ_{t≥2} (w_t - ξw_{t-1})ᵀ Q (w_t - ξw_{t-1}) / (1 - ξ²).
  [[nodiscard]] double quadratic(double xi, double rho) const;

  /// log p(w | ξ, ρ, τ²) given log det Q(ρ).
  [[nodiscard]] double log_density(double xi, double rho, double tau2, double log_det_q) const;
};

}  // namespace strelcast::model
