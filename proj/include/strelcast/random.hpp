#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace strelcast {

using Rng = std::mt19937_64;

/// Independent stream for a (seed, key...) tuple, e.g. (master, window, variant).
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {});

double standard_normal(Rng& rng);
Eigen::VectorXd standard_normal_vector(Rng& rng, Eigen::Index n);
Eigen::MatrixXd standard_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
double uniform01(Rng& rng);

/// Draw from IG(shape, scale): density ∝ x^{-shape-1} exp(-scale / x).
double inverse_gamma(Rng& rng, double shape, double scale);

/// Normal(mean, sd²) restricted to [lo, hi], by rejection.
double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi);

/// log Φ(x) via erfc, accurate in the lower tail.
double log_normal_cdf(double x);

/// log of the mass Normal(mean, sd²) puts on [lo, hi].
double log_interval_mass(double mean, double sd, double lo, double hi);

/// Draw from N(mean, P⁻¹) given the precision P.
Eigen::VectorXd gaussian_from_precision(Rng& rng, const Eigen::MatrixXd& precision, const Eigen::VectorXd& linear,
                                        Eigen::VectorXd* mean_out = nullptr);

}  // namespace strelcast
