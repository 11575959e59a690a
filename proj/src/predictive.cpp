#include "strelcast/predictive.hpp"

#include "strelcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace strelcast::model {

namespace {

void check_horizon(const FitResult& fit, std::size_t h) {
  if (h < 1) throw std::invalid_argument("forecast horizon must be at least one step");
  if (fit.draws.empty()) throw std::invalid_argument("no posterior draws to predict from");
  // Evaluating the last row validates the design range once, up front.
  (void)fit.harmonic.row(fit.forecast_time(h));
}

Trace one_trajectory(const FitResult& fit, std::size_t m, std::size_t h, const Eigen::VectorXd& last_observed,
                     const LaplacianBasis& basis, std::uint64_t seed) {
  const auto& draw = fit.draws[m];
  const auto n = last_observed.size();
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(m)});
  const Eigen::MatrixXd w = forecast_latent(draw, draw.w_last, h, basis, rng);
  Eigen::MatrixXd values(n, static_cast<Eigen::Index>(h) + 1);
  values.col(0) = last_observed;
  const double sigma = std::sqrt(draw.sigma2);
  for (std::size_t s = 1; s <= h; ++s) {
    const Eigen::VectorXd hrow = fit.harmonic.row(fit.forecast_time(s));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mean = draw.beta0 + (hrow.size() ? hrow.dot(draw.beta_of(static_cast<std::size_t>(i))) : 0.0);
      const double log_y = mean + w(i, static_cast<Eigen::Index>(s) - 1) + sigma * standard_normal(rng);
      values(i, static_cast<Eigen::Index>(s)) = std::exp(log_y);
    }
  }
  return Trace(std::move(values));
}

}  // namespace

Eigen::MatrixXd forecast_latent(const PosteriorDraw& draw, const Eigen::VectorXd& w_start, std::size_t steps,
                                const LaplacianBasis& basis, Rng& rng) {
  const auto n = w_start.size();
  Eigen::MatrixXd w(n, static_cast<Eigen::Index>(steps));
  if (draw.tau2 <= 0.0) {
    // No latent process (baseline).
    Eigen::VectorXd cur = w_start;
    for (std::size_t s = 0; s < steps; ++s) {
      cur *= draw.xi;
      w.col(static_cast<Eigen::Index>(s)) = cur;
    }
    return w;
  }
  const Eigen::VectorXd scale =
      (std::sqrt(draw.tau2) * basis.precision_eigenvalues(draw.rho).array().rsqrt()).matrix();
  const double innov = std::sqrt(1.0 - draw.xi * draw.xi);
  Eigen::VectorXd cur = w_start;
  for (std::size_t s = 0; s < steps; ++s) {
    const Eigen::VectorXd z = standard_normal_vector(rng, n);
    const Eigen::VectorXd u = basis.eigenvectors * scale.cwiseProduct(z);
    cur = draw.xi * cur + innov * u;
    w.col(static_cast<Eigen::Index>(s)) = cur;
  }
  return w;
}

std::vector<Trace> predictive_draws(const FitResult& fit, std::size_t h, const Eigen::VectorXd& last_observed,
                                    const LaplacianBasis& basis, std::uint64_t seed) {
  check_horizon(fit, h);
  std::vector<Trace> out(fit.draws.size());
  const auto count = static_cast<std::ptrdiff_t>(fit.draws.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    out[static_cast<std::size_t>(m)] = one_trajectory(fit, static_cast<std::size_t>(m), h, last_observed, basis, seed);
  }
  return out;
}

std::vector<Trace> predictive_draws_serial(const FitResult& fit, std::size_t h, const Eigen::VectorXd& last_observed,
                                           const LaplacianBasis& basis, std::uint64_t seed) {
  check_horizon(fit, h);
  std::vector<Trace> out;
  out.reserve(fit.draws.size());
  for (std::size_t m = 0; m < fit.draws.size(); ++m) out.push_back(one_trajectory(fit, m, h, last_observed, basis, seed));
  return out;
}

double draw_log_density(const FitResult& fit, const PosteriorDraw& draw, std::size_t h,
                        const Eigen::VectorXd& observed_future, const LaplacianBasis& basis) {
  const auto n = observed_future.size();
  const Eigen::VectorXd hrow = fit.harmonic.row(fit.forecast_time(h));
  const double decay = std::pow(draw.xi, static_cast<double>(h));
  Eigen::VectorXd resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = draw.beta0 + (hrow.size() ? hrow.dot(draw.beta_of(static_cast<std::size_t>(i))) : 0.0) +
                        (draw.w_last.size() ? decay * draw.w_last[i] : 0.0);
    resid[i] = std::log(observed_future[i]) - mean;
  }
  // Covariance is diagonal in the Laplacian eigenbasis.
  const Eigen::VectorXd z = basis.eigenvectors.transpose() * resid;
  const double latent = draw.tau2 * (1.0 - std::pow(draw.xi, 2.0 * static_cast<double>(h)));
  const Eigen::VectorXd q = basis.precision_eigenvalues(draw.rho);
  double out = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double var = draw.sigma2 + (latent > 0.0 ? latent / q[k] : 0.0);
    out += -0.5 * (std::log(2.0 * std::numbers::pi * var) + z[k] * z[k] / var);
  }
  return out;
}

double lpds(const FitResult& fit, std::size_t h, const Eigen::VectorXd& observed_future, const LaplacianBasis& basis) {
  check_horizon(fit, h);
  if (observed_future.size() != basis.eigenvalues.size()) {
    throw std::invalid_argument("observed field does not match the grid");
  }
  for (Eigen::Index i = 0; i < observed_future.size(); ++i) {
    if (!(observed_future[i] > 0.0)) {
      throw DataError("nonpositive observation " + std::to_string(observed_future[i]) + " at location " + std::to_string(i));
    }
  }
  std::vector<double> terms(fit.draws.size());
  for (std::size_t m = 0; m < fit.draws.size(); ++m) terms[m] = draw_log_density(fit, fit.draws[m], h, observed_future, basis);
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum / static_cast<double>(terms.size()));
}

std::vector<double> cumulative_log_bayes_factor(const std::vector<double>& lpds_a, const std::vector<double>& lpds_b) {
  if (lpds_a.size() != lpds_b.size()) {
    throw std::invalid_argument("LPDS series differ in length (" + std::to_string(lpds_a.size()) + " vs " +
                                std::to_string(lpds_b.size()) + ")");
  }
  std::vector<double> out(lpds_a.size());
  double running = 0.0;
  for (std::size_t k = 0; k < lpds_a.size(); ++k) {
    running += lpds_a[k] - lpds_b[k];
    out[k] = running;
  }
  return out;
}

}  // namespace strelcast::model
