#include "strelcast/gibbs.hpp"

#include "strelcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace strelcast::model {

namespace {

constexpr std::size_t kAdaptEvery = 50;

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// Index drawn with probability ∝ exp(log_w).
std::size_t categorical(Rng& rng, const std::vector<double>& log_w) {
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double total = 0.0;
  for (double lw : log_w) total += std::exp(lw - top);
  double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    u -= std::exp(log_w[k] - top);
    if (u < 0.0) return k;
  }
  return log_w.size() - 1;
}

}  // namespace

Sampler::Sampler(const Eigen::MatrixXd& log_y, const SpatialGrid& grid, const ModelConfig& config,
                 std::size_t time_offset, Rng rng)
    : log_y_(log_y), grid_(grid), config_(config), basis_(grid), rng_(std::move(rng)) {
  config_.validate();
  hyper_ = config_.hyper.resolved(config_.harmonic.dim());
  const auto n = log_y_.rows();
  const auto T = log_y_.cols();
  const auto dim = static_cast<Eigen::Index>(config_.harmonic.dim());
  if (static_cast<std::size_t>(n) != grid.size()) {
    throw std::invalid_argument("training data has " + std::to_string(n) + " locations but the grid has " +
                                std::to_string(grid.size()));
  }
  if (T < 2 * dim + 2) {
    throw std::invalid_argument("training window of " + std::to_string(T) + " slots is too short for " +
                                std::to_string(dim / 2) + " harmonic frequencies");
  }
  H_ = config_.harmonic.matrix(time_offset, static_cast<std::size_t>(T));
  HtH_ = H_.transpose() * H_;
  S0_inv_ = hyper_.S0.inverse();
  S0_inv_m0_ = S0_inv_ * hyper_.m0;
  laplacian_ = graph_laplacian(grid);

  state_.beta0 = log_y_.mean();
  state_.betas.assign(1, hyper_.m0);
  state_.assignments.assign(static_cast<std::size_t>(n), 0);
  state_.w = Eigen::MatrixXd::Zero(n, T);
  double v = (log_y_.array() - state_.beta0).square().mean();
  if (!(v > 0.0)) v = 1.0;
  if (has_latent()) {
    state_.xi = 0.5;
    state_.rho = config_.variant == Variant::car_ar_rho_fixed ? config_.rho0 : 0.5;
    state_.sigma2 = 0.5 * v;
    state_.tau2 = 0.5 * v;
  } else {
    state_.sigma2 = v;
  }
  refresh_stats();
}

Eigen::MatrixXd Sampler::harmonic_fit() const {
  const auto n = log_y_.rows();
  Eigen::MatrixXd fit(n, log_y_.cols());
  if (H_.cols() == 0) return fit.setZero();
  std::vector<Eigen::VectorXd> per_cluster;
  per_cluster.reserve(state_.betas.size());
  for (const auto& b : state_.betas) per_cluster.push_back(H_ * b);
  for (Eigen::Index i = 0; i < n; ++i) fit.row(i) = per_cluster[state_.assignments[static_cast<std::size_t>(i)]].transpose();
  return fit;
}

void Sampler::refresh_stats() { stats_ = LatentStats(state_.w, laplacian_); }

void Sampler::update_assignments() {
  if (config_.variant != Variant::car_ar_bnp || H_.cols() == 0) return;
  const auto n = static_cast<std::size_t>(log_y_.rows());
  const std::size_t C = config_.bnp.n_aux;
  const double log_aux_weight = std::log(config_.bnp.alpha / static_cast<double>(C));
  const Eigen::MatrixXd resid = (log_y_.array() - state_.beta0).matrix() - state_.w;
  const Eigen::MatrixXd Htr = resid * H_;  // row i = (Hᵀ r_i)ᵀ
  const Eigen::MatrixXd S0_chol = hyper_.S0.llt().matrixL();
  const auto prior_draw = [&] { return Eigen::VectorXd(hyper_.m0 + S0_chol * standard_normal_vector(rng_, H_.cols())); };

  std::vector<Eigen::VectorXd> aux(C);
  for (auto& a : aux) a = prior_draw();
  auto& betas = state_.betas;
  auto& assign = state_.assignments;
  std::vector<std::size_t> counts(betas.size(), 0);
  for (auto c : assign) ++counts[c];

  const double inv_s2 = 1.0 / state_.sigma2;
  const auto log_lik = [&](std::size_t i, const Eigen::VectorXd& b) {
    return (b.dot(Htr.row(static_cast<Eigen::Index>(i))) - 0.5 * b.dot(HtH_ * b)) * inv_s2;
  };

  std::vector<double> log_w;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = assign[i];
    if (--counts[j] == 0) {
      // Reuse: the emptied cluster's value becomes an auxiliary candidate.
      aux[uniform_index(rng_, C)] = betas[j];
      const std::size_t last = betas.size() - 1;
      if (j != last) {
        betas[j] = betas[last];
        counts[j] = counts[last];
        for (auto& c : assign) {
          if (c == last) c = j;
        }
      }
      betas.pop_back();
      counts.pop_back();
    }
    log_w.clear();
    for (std::size_t k = 0; k < betas.size(); ++k) log_w.push_back(std::log(static_cast<double>(counts[k])) + log_lik(i, betas[k]));
    for (std::size_t k = 0; k < C; ++k) log_w.push_back(log_aux_weight + log_lik(i, aux[k]));
    const std::size_t pick = categorical(rng_, log_w);
    if (pick < betas.size()) {
      assign[i] = pick;
      ++counts[pick];
    } else {
      const std::size_t k = pick - betas.size();
      betas.push_back(aux[k]);
      counts.push_back(1);
      assign[i] = betas.size() - 1;
      aux[k] = prior_draw();
    }
  }
}

void Sampler::update_betas() {
  if (H_.cols() == 0) return;
  const Eigen::MatrixXd resid = (log_y_.array() - state_.beta0).matrix() - state_.w;
  const Eigen::MatrixXd Htr = resid * H_;
  const std::size_t J = state_.betas.size();
  std::vector<Eigen::VectorXd> sums(J, Eigen::VectorXd::Zero(H_.cols()));
  std::vector<double> counts(J, 0.0);
  for (std::size_t i = 0; i < state_.assignments.size(); ++i) {
    sums[state_.assignments[i]] += Htr.row(static_cast<Eigen::Index>(i)).transpose();
    counts[state_.assignments[i]] += 1.0;
  }
  for (std::size_t j = 0; j < J; ++j) {
    const Eigen::MatrixXd prec = S0_inv_ + counts[j] * HtH_ / state_.sigma2;
    const Eigen::VectorXd lin = S0_inv_m0_ + sums[j] / state_.sigma2;
    state_.betas[j] = gaussian_from_precision(rng_, prec, lin);
  }
}

void Sampler::update_beta0() {
  const double total = (log_y_ - harmonic_fit() - state_.w).sum();
  const double prec = 1.0 / hyper_.beta0_var + static_cast<double>(log_y_.size()) / state_.sigma2;
  const double mean = total / state_.sigma2 / prec;
  state_.beta0 = mean + standard_normal(rng_) / std::sqrt(prec);
}

void Sampler::update_latent() {
  if (!has_latent()) return;
  const Eigen::MatrixXd resid = (log_y_ - harmonic_fit()).array() - state_.beta0;
  const LatentParams p{state_.xi, state_.rho, state_.tau2, state_.sigma2};
  state_.w = reference_latent_ ? sample_latent_sparse(resid, grid_, p, rng_) : sample_latent_spectral(resid, basis_, p, rng_);
  if (!state_.w.allFinite()) throw NumericalError("latent field draw is not finite");
  refresh_stats();
}

void Sampler::update_rho_xi() {
  if (!has_latent()) return;
  const double T = static_cast<double>(log_y_.cols());
  const double I = static_cast<double>(log_y_.rows());
  const double tau2 = state_.tau2;

  if (config_.variant != Variant::car_ar_rho_fixed) {
    const auto target = [&](double rho) {
      return 0.5 * T * basis_.log_det(rho) - stats_.quadratic(state_.xi, rho) / (2.0 * tau2);
    };
    const double cur = state_.rho;
    const double prop = truncated_normal(rng_, cur, sd_rho_, 0.0, 1.0);
    ++tries_rho_;
    ++total_tries_rho_;
    if (prop < 1.0) {
      const double log_alpha = target(prop) - target(cur) + log_interval_mass(cur, sd_rho_, 0.0, 1.0) -
                               log_interval_mass(prop, sd_rho_, 0.0, 1.0);
      if (std::isfinite(log_alpha) && std::log(uniform01(rng_)) < log_alpha) {
        state_.rho = prop;
        ++accepts_rho_;
        ++total_accepts_rho_;
      }
    }
  }

  const auto target = [&](double xi) {
    return -0.5 * I * (T - 1.0) * std::log(1.0 - xi * xi) - stats_.quadratic(xi, state_.rho) / (2.0 * tau2);
  };
  const double cur = state_.xi;
  const double prop = truncated_normal(rng_, cur, sd_xi_, -1.0, 1.0);
  ++tries_xi_;
  ++total_tries_xi_;
  if (std::abs(prop) < 1.0) {
    const double log_alpha = target(prop) - target(cur) + log_interval_mass(cur, sd_xi_, -1.0, 1.0) -
                             log_interval_mass(prop, sd_xi_, -1.0, 1.0);
    if (std::isfinite(log_alpha) && std::log(uniform01(rng_)) < log_alpha) {
      state_.xi = prop;
      ++accepts_xi_;
      ++total_accepts_xi_;
    }
  }
}

void Sampler::update_variances() {
  const double n = static_cast<double>(log_y_.size());
  const Eigen::MatrixXd eps = (log_y_ - harmonic_fit() - state_.w).array() - state_.beta0;
  state_.sigma2 = inverse_gamma(rng_, hyper_.a_sigma + 0.5 * n, hyper_.b_sigma + 0.5 * eps.squaredNorm());
  if (has_latent()) {
    state_.tau2 = inverse_gamma(rng_, hyper_.a_tau + 0.5 * n, hyper_.b_tau + 0.5 * stats_.quadratic(state_.xi, state_.rho));
  }
}

void Sampler::sweep() {
  update_assignments();
  update_betas();
  update_beta0();
  update_latent();
  update_rho_xi();
  update_variances();
}

void Sampler::adapt_proposals() {
  const auto tune = [](double& sd, std::size_t& tries, std::size_t& accepts) {
    if (tries == 0) return;
    const double rate = static_cast<double>(accepts) / static_cast<double>(tries);
    if (rate < 0.2) sd = std::max(1e-4, sd * 0.8);
    if (rate > 0.4) sd = std::min(1.0, sd * 1.25);
    tries = 0;
    accepts = 0;
  };
  tune(sd_rho_, tries_rho_, accepts_rho_);
  tune(sd_xi_, tries_xi_, accepts_xi_);
}

double Sampler::acceptance_rho() const {
  return total_tries_rho_ == 0 ? 0.0 : static_cast<double>(total_accepts_rho_) / static_cast<double>(total_tries_rho_);
}

double Sampler::acceptance_xi() const {
  return total_tries_xi_ == 0 ? 0.0 : static_cast<double>(total_accepts_xi_) / static_cast<double>(total_tries_xi_);
}

PosteriorDraw Sampler::snapshot(bool keep_w) const {
  PosteriorDraw d = state_;
  d.w_last = state_.w.col(state_.w.cols() - 1);
  if (!keep_w) d.w.resize(0, 0);
  return d;
}

FitResult gibbs_run(const Trace& data, const SpatialGrid& grid, const ModelConfig& config, std::size_t time_offset) {
  const auto& y = data.values();
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (!(y(i, t) > 0.0)) {
        throw DataError("nonpositive value " + std::to_string(y(i, t)) + " at location " + std::to_string(i) +
                        ", time " + std::to_string(t) + "; the model works on log(y)");
      }
    }
  }
  config.validate();
  Sampler sampler(y.array().log().matrix(), grid, config, time_offset, make_rng(config.mcmc.seed));

  FitResult fit;
  fit.variant = config.variant;
  fit.harmonic = config.harmonic;
  fit.time_offset = time_offset;
  fit.n_times = data.n_times();
  fit.draws.reserve(config.mcmc.n_draws());
  const auto& m = config.mcmc;
  for (std::size_t it = 1; it <= m.iters; ++it) {
    try {
      sampler.sweep();
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (iteration " + std::to_string(it) + ", draw index " +
                           std::to_string(fit.draws.size()) + ")");
    }
    if (it <= m.burnin) {
      if (it % kAdaptEvery == 0) sampler.adapt_proposals();
      continue;
    }
    if ((it - m.burnin) % m.thin == 0 && fit.draws.size() < m.n_draws()) {
      fit.draws.push_back(sampler.snapshot(config.keep_w));
    }
  }
  fit.accept_rho = sampler.acceptance_rho();
  fit.accept_xi = sampler.acceptance_xi();
  return fit;
}

}  // namespace strelcast::model
