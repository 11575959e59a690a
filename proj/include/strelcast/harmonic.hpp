#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace strelcast::model {

/// Seasonal regressors h_t = (cos 2πω_1 t, sin 2πω_1 t, ..., cos 2πω_K t, sin 2πω_K t).
/// Time indices are absolute slots of the source series, so designs stay in phase across
/// shifted training windows.
class HarmonicDesign {
 public:
  HarmonicDesign() = default;

  /// Frequencies must be distinct and lie in (0, 0.5]. `max_time`, when set, is the last
  /// time index the design may be evaluated at.
  explicit HarmonicDesign(std::vector<double> frequencies,
                          std::optional<std::size_t> max_time = std::nullopt);

  [[nodiscard]] const std::vector<double>& frequencies() const { return frequencies_; }
  [[nodiscard]] std::size_t n_frequencies() const { return frequencies_.size(); }
  [[nodiscard]] std::size_t dim() const { return 2 * frequencies_.size(); }
  [[nodiscard]] const std::optional<std::size_t>& max_time() const { return max_time_; }

  [[nodiscard]] Eigen::VectorXd row(std::size_t t) const;

  /// Rows for t = first, ..., first + count - 1.
  [[nodiscard]] Eigen::MatrixXd matrix(std::size_t first, std::size_t count) const;

 private:
  std::vector<double> frequencies_;
  std::optional<std::size_t> max_time_;
};

struct SpectralEstimate {
  double frequency;
  double power;
};

/// Raw periodogram |Σ (x_t - x̄) e^{-2πi k t / T}|² / T at k/T, k = 1..floor(T/2).
/// Requires T >= 4.
std::vector<SpectralEstimate> periodogram(const Eigen::VectorXd& series);

/// Frequencies of the `n` largest estimates, ordered by decreasing power (ties by frequency).
std::vector<double> top_frequencies(const std::vector<SpectralEstimate>& spectrum, std::size_t n);

}  // namespace strelcast::model
