#pragma once

#include "strelcast/harmonic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace strelcast::model {

enum class Variant { baseline, car_ar_rho_fixed, car_ar, car_ar_bnp };

std::string variant_name(Variant v);
/// Throws std::invalid_argument on unknown names.
Variant parse_variant(const std::string& name);

struct Hyperparams {
  /// Prior mean of the harmonic coefficients; empty means zero.
  Eigen::VectorXd m0;
  /// Prior covariance of the harmonic coefficients; empty means s0_scale * identity.
  Eigen::MatrixXd S0;
  double s0_scale = 0.1;
  double a_sigma = 1.0;
  double b_sigma = 0.01;
  double a_tau = 1.0;
  double b_tau = 0.01;
  double beta0_var = 100.0;

  /// Fills defaults for coefficient dimension `dim` and validates.
  [[nodiscard]] Hyperparams resolved(std::size_t dim) const;
};

struct BNPConfig {
  double alpha = 1.0;
  std::size_t n_aux = 50;
};

struct McmcSettings {
  std::size_t iters = 10000;
  std::size_t burnin = 5000;
  std::size_t thin = 50;
  std::uint64_t seed = 1;

  [[nodiscard]] std::size_t n_draws() const { return (iters - burnin) / thin; }
};

struct ModelConfig {
  Variant variant = Variant::car_ar;
  /// Fixed ρ of the car_ar_rho_fixed variant.
  double rho0 = 0.9;
  HarmonicDesign harmonic;
  Hyperparams hyper;
  BNPConfig bnp;
  McmcSettings mcmc;
  /// Keep the full latent field of every retained draw (memory heavy).
  bool keep_w = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// {"variant", "rho0", "frequencies", "hyper": {...}, "bnp": {...}, "mcmc": {...}, "keep_w"}.
/// Missing fields keep their defaults.
ModelConfig parse_model_config(const std::string& json_text);
ModelConfig load_model_config(const std::filesystem::path& path);
std::string model_config_json(const ModelConfig& config);

}  // namespace strelcast::model
