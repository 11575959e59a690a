#pragma once

#include "strelcast/gibbs.hpp"
#include "strelcast/leroux.hpp"
#include "strelcast/random.hpp"
#include "strelcast/spatial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace strelcast::model {

/// Continues the latent AR(1)-CAR process `steps` slots past `w_start`:
/// w_{s} = ξ w_{s-1} + √(1-ξ²) u_s, u_s ~ N(0, τ² Q(ρ)⁻¹). Returns I × steps.
Eigen::MatrixXd forecast_latent(const PosteriorDraw& draw, const Eigen::VectorXd& w_start, std::size_t steps,
                                const LaplacianBasis& basis, Rng& rng);

/**
 * One predictive trajectory per posterior draw. Column 0 of each trace is `last_observed`
 * (the forecast origin), columns 1..h are draws on the original scale. Draw m uses the
 * stream make_rng(seed, {m}), so the output does not depend on the thread count.
 * Throws std::invalid_argument if h < 1 or the horizon leaves the harmonic design range.
 */
std::vector<Trace> predictive_draws(const FitResult& fit, std::size_t h, const Eigen::VectorXd& last_observed,
                                    const LaplacianBasis& basis, std::uint64_t seed);

/// Single-threaded reference for predictive_draws.
std::vector<Trace> predictive_draws_serial(const FitResult& fit, std::size_t h, const Eigen::VectorXd& last_observed,
                                           const LaplacianBasis& basis, std::uint64_t seed);

/// log density of log(observed_future) under draw m's exact h-step Gaussian:
/// mean β0 + h_{t+h}ᵀβ + ξ^h w_t, covariance σ²I + τ²(1-ξ^{2h}) Q(ρ)⁻¹.
double draw_log_density(const FitResult& fit, const PosteriorDraw& draw, std::size_t h,
                        const Eigen::VectorXd& observed_future, const LaplacianBasis& basis);

/// log of the average predictive density over draws (log scale, no Jacobian).
/// Throws std::invalid_argument on an empty draw list and DataError on nonpositive
/// observations.
double lpds(const FitResult& fit, std::size_t h, const Eigen::VectorXd& observed_future, const LaplacianBasis& basis);

/// Running sum of lpds_a - lpds_b.
std::vector<double> cumulative_log_bayes_factor(const std::vector<double>& lpds_a, const std::vector<double>& lpds_b);

}  // namespace strelcast::model
