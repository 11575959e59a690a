#pragma once

#include "strelcast/harmonic.hpp"
#include "strelcast/random.hpp"
#include "strelcast/spatial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace strelcast::model {

/// Generator settings for log y_{i,t} = β0 + h_tᵀβ_{c(i)} + w_{i,t} + ε_{i,t}.
struct SimulationParams {
  double beta0 = 0.0;
  /// Coefficient vector per cluster; each of length design.dim().
  std::vector<Eigen::VectorXd> betas;
  /// Cluster of each location; empty means every location uses betas[0].
  std::vector<std::size_t> assignments;
  double xi = 0.0;
  double rho = 0.0;
  /// τ² = 0 switches the latent field off (baseline data).
  double tau2 = 0.0;
  double sigma2 = 1.0;
};

struct SimulatedData {
  Trace y;
  Eigen::MatrixXd log_y;
  Eigen::MatrixXd w;
};

/// Draws T slots starting at absolute time `time_offset`, with w_1 from the stationary
/// distribution N(0, τ² Q(ρ)⁻¹).
SimulatedData simulate(const SpatialGrid& grid, const HarmonicDesign& design, const SimulationParams& params,
                       std::size_t n_times, std::size_t time_offset, Rng& rng);

}  // namespace strelcast::model
