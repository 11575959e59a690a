#include "strelcast/random.hpp"

#include "strelcast/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace strelcast {

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  const auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto k : keys) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method: portable, unlike std::normal_distribution's unspecified algorithm.
  while (true) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

Eigen::VectorXd standard_normal_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index k = 0; k < n; ++k) z[k] = standard_normal(rng);
  return z;
}

Eigen::MatrixXd standard_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd z(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) z(r, c) = standard_normal(rng);
  }
  return z;
}

double uniform01(Rng& rng) {
  // 53 random bits in [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double inverse_gamma(Rng& rng, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(scale)) {
    throw NumericalError("inverse-gamma parameters must be positive and finite");
  }
  std::gamma_distribution<double> gamma(shape, 1.0 / scale);
  return 1.0 / gamma(rng);
}

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  if (!(lo < hi) || !(sd > 0.0)) throw std::invalid_argument("truncated normal needs lo < hi and sd > 0");
  if (std::exp(log_interval_mass(mean, sd, lo, hi)) < 1e-6) {
    throw NumericalError("truncated normal interval carries negligible mass");
  }
  while (true) {
    const double x = mean + sd * standard_normal(rng);
    if (x >= lo && x <= hi) return x;
  }
}

double log_normal_cdf(double x) {
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double log_interval_mass(double mean, double sd, double lo, double hi) {
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  // Φ(b) - Φ(a) computed on the side with less cancellation.
  if (a > 0.0) return std::log(0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2)));
  return std::log(0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2)));
}

Eigen::VectorXd gaussian_from_precision(Rng& rng, const Eigen::MatrixXd& precision, const Eigen::VectorXd& linear,
                                        Eigen::VectorXd* mean_out) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("Gaussian full conditional precision is not positive definite");
  Eigen::VectorXd mean = llt.solve(linear);
  const Eigen::VectorXd z = standard_normal_vector(rng, linear.size());
  Eigen::VectorXd x = mean + llt.matrixU().solve(z);
  if (mean_out != nullptr) *mean_out = std::move(mean);
  return x;
}

}  // namespace strelcast
