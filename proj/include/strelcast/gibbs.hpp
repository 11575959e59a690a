#pragma once

#include "strelcast/latent_field.hpp"
#include "strelcast/leroux.hpp"
#include "strelcast/model_config.hpp"
#include "strelcast/random.hpp"
#include "strelcast/spatial.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace strelcast::model {

/// One retained MCMC state. For the baseline variant w ≡ 0 and ξ, ρ, τ² are reported as 0.
/// Models with common coefficients have a single cluster and all assignments 0.
struct PosteriorDraw {
  double beta0 = 0.0;
  std::vector<Eigen::VectorXd> betas;
  std::vector<std::size_t> assignments;
  /// Full I×T latent field; empty unless the fit kept it.
  Eigen::MatrixXd w;
  /// Latent field at the last training slot (always kept, drives forecasts).
  Eigen::VectorXd w_last;
  double xi = 0.0;
  double rho = 0.0;
  double tau2 = 0.0;
  double sigma2 = 1.0;

  [[nodiscard]] std::size_t n_clusters() const { return betas.size(); }
  [[nodiscard]] const Eigen::VectorXd& beta_of(std::size_t location) const { return betas[assignments[location]]; }
};

struct FitResult {
  Variant variant = Variant::car_ar;
  HarmonicDesign harmonic;
  /// Absolute time index of the first training column.
  std::size_t time_offset = 0;
  std::size_t n_times = 0;
  std::vector<PosteriorDraw> draws;
  double accept_rho = 0.0;
  double accept_xi = 0.0;

  /// Absolute time index `steps` slots after the last training column.
  [[nodiscard]] std::size_t forecast_time(std::size_t steps) const { return time_offset + n_times - 1 + steps; }
};

/**
 * Gibbs sampler state for one chain. Each sub-step is callable on its own for testing; a
 * full sweep runs them in the order assignments, coefficients, intercept, latent field,
 * (ρ, ξ), variances.
 */
class Sampler {
 public:
  /// `log_y` is I×T (already log-transformed); column s is absolute time time_offset + s.
  Sampler(const Eigen::MatrixXd& log_y, const SpatialGrid& grid, const ModelConfig& config,
          std::size_t time_offset, Rng rng);

  // (a) cluster assignments by the marginal reuse sampler (BNP variant only).
  void update_assignments();
  // (b) unique coefficient vectors from their Gaussian full conditionals.
  void update_betas();
  void update_beta0();
  // (c) joint draw of the latent field.
  void update_latent();
  // (d) Metropolis–Hastings updates of ρ and ξ with truncated-normal proposals.
  void update_rho_xi();
  // (e) conjugate inverse-gamma updates of σ² and τ².
  void update_variances();

  void sweep();

  /// Retunes the proposal scales toward 20-40% acceptance from counts since the last call.
  void adapt_proposals();

  [[nodiscard]] PosteriorDraw snapshot(bool keep_w) const;

  // State access for tests.
  PosteriorDraw& state() { return state_; }
  [[nodiscard]] const PosteriorDraw& state() const { return state_; }
  [[nodiscard]] const Eigen::MatrixXd& design() const { return H_; }
  [[nodiscard]] double proposal_sd_rho() const { return sd_rho_; }
  [[nodiscard]] double proposal_sd_xi() const { return sd_xi_; }
  [[nodiscard]] double acceptance_rho() const;
  [[nodiscard]] double acceptance_xi() const;
  /// Use the sparse-Cholesky reference for step (c) instead of the spectral kernel.
  void use_reference_latent_sampler(bool on) { reference_latent_ = on; }

 private:
  [[nodiscard]] bool has_latent() const { return config_.variant != Variant::baseline; }
  [[nodiscard]] Eigen::MatrixXd harmonic_fit() const;
  void refresh_stats();

  Eigen::MatrixXd log_y_;
  const SpatialGrid& grid_;
  ModelConfig config_;
  Hyperparams hyper_;
  Eigen::MatrixXd H_;    // T × 2K design
  Eigen::MatrixXd HtH_;  // 2K × 2K
  Eigen::MatrixXd S0_inv_;
  Eigen::VectorXd S0_inv_m0_;
  LaplacianBasis basis_;
  Eigen::SparseMatrix<double> laplacian_;
  Rng rng_;
  PosteriorDraw state_;
  LatentStats stats_;
  bool reference_latent_ = false;
  double sd_rho_ = 0.05;
  double sd_xi_ = 0.05;
  std::size_t tries_rho_ = 0, accepts_rho_ = 0, tries_xi_ = 0, accepts_xi_ = 0;
  std::size_t total_tries_rho_ = 0, total_accepts_rho_ = 0, total_tries_xi_ = 0, total_accepts_xi_ = 0;
};

/// Runs the chain and returns (iters - burnin) / thin retained draws. `data` must be
/// strictly positive; it is log-transformed internally. Throws DataError on nonpositive
/// data, std::invalid_argument on bad configuration and NumericalError (naming the
/// iteration and draw index) if a factorization fails.
FitResult gibbs_run(const Trace& data, const SpatialGrid& grid, const ModelConfig& config,
                    std::size_t time_offset = 0);

}  // namespace strelcast::model
