#include "strelcast/harmonic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace strelcast::model {

namespace {

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

HarmonicDesign::HarmonicDesign(std::vector<double> frequencies, std::optional<std::size_t> max_time)
    : frequencies_(std::move(frequencies)), max_time_(max_time) {
  for (std::size_t k = 0; k < frequencies_.size(); ++k) {
    const double w = frequencies_[k];
    if (!(w > 0.0 && w <= 0.5)) {
      throw std::invalid_argument("harmonic frequency " + std::to_string(w) + " outside (0, 0.5]");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (frequencies_[j] == w) throw std::invalid_argument("duplicate harmonic frequency " + std::to_string(w));
    }
  }
}

Eigen::VectorXd HarmonicDesign::row(std::size_t t) const {
  if (max_time_ && t > *max_time_) {
    throw std::invalid_argument("time index " + std::to_string(t) + " exceeds harmonic design range (last " +
                                std::to_string(*max_time_) + ")");
  }
  Eigen::VectorXd h(static_cast<Eigen::Index>(dim()));
  for (std::size_t k = 0; k < frequencies_.size(); ++k) {
    const double arg = 2.0 * std::numbers::pi * frequencies_[k] * static_cast<double>(t);
    h[static_cast<Eigen::Index>(2 * k)] = std::cos(arg);
    h[static_cast<Eigen::Index>(2 * k + 1)] = std::sin(arg);
  }
  return h;
}

Eigen::MatrixXd HarmonicDesign::matrix(std::size_t first, std::size_t count) const {
  Eigen::MatrixXd H(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim()));
  for (std::size_t s = 0; s < count; ++s) H.row(static_cast<Eigen::Index>(s)) = row(first + s).transpose();
  return H;
}

std::vector<SpectralEstimate> periodogram(const Eigen::VectorXd& series) {
  const auto n = static_cast<std::size_t>(series.size());
  if (n < 4) throw std::invalid_argument("periodogram needs at least 4 observations");
  if (!series.allFinite()) throw std::invalid_argument("periodogram input must be finite");

  std::vector<double> in(n);
  const double mean = series.mean();
  for (std::size_t t = 0; t < n; ++t) in[t] = series[static_cast<Eigen::Index>(t)] - mean;
  std::vector<std::complex<double>> out(n / 2 + 1);

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<SpectralEstimate> spectrum;
  spectrum.reserve(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    spectrum.push_back({static_cast<double>(k) / static_cast<double>(n), std::norm(out[k]) / static_cast<double>(n)});
  }
  return spectrum;
}

std::vector<double> top_frequencies(const std::vector<SpectralEstimate>& spectrum, std::size_t n) {
  auto sorted = spectrum;
  std::stable_sort(sorted.begin(), sorted.end(), [](const SpectralEstimate& a, const SpectralEstimate& b) {
    return a.power > b.power;
  });
  std::vector<double> out;
  for (std::size_t k = 0; k < std::min(n, sorted.size()); ++k) out.push_back(sorted[k].frequency);
  return out;
}

}  // namespace strelcast::model
