#include "strelcast/simulate.hpp"

#include "strelcast/leroux.hpp"

#include <cmath>
#include <stdexcept>

namespace strelcast::model {

SimulatedData simulate(const SpatialGrid& grid, const HarmonicDesign& design, const SimulationParams& params,
                       std::size_t n_times, std::size_t time_offset, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto T = static_cast<Eigen::Index>(n_times);
  if (T < 1) throw std::invalid_argument("simulation needs at least one time slot");
  if (params.betas.empty() && design.dim() > 0) throw std::invalid_argument("simulation needs coefficients");
  for (const auto& b : params.betas) {
    if (b.size() != static_cast<Eigen::Index>(design.dim())) throw std::invalid_argument("coefficient dimension mismatch");
  }
  if (!params.assignments.empty() && params.assignments.size() != grid.size()) {
    throw std::invalid_argument("one cluster assignment per location is required");
  }
  if (!(std::abs(params.xi) < 1.0) || !(params.rho >= 0.0 && params.rho < 1.0) || params.tau2 < 0.0 ||
      !(params.sigma2 >= 0.0)) {
    throw std::invalid_argument("simulation parameters out of range");
  }

  SimulatedData out;
  out.w = Eigen::MatrixXd::Zero(n, T);
  if (params.tau2 > 0.0) {
    const LaplacianBasis basis(grid);
    const Eigen::VectorXd scale = (std::sqrt(params.tau2) * basis.precision_eigenvalues(params.rho).array().rsqrt()).matrix();
    const double innov = std::sqrt(1.0 - params.xi * params.xi);
    for (Eigen::Index t = 0; t < T; ++t) {
      const Eigen::VectorXd u = basis.eigenvectors * scale.cwiseProduct(standard_normal_vector(rng, n));
      out.w.col(t) = t == 0 ? u : Eigen::VectorXd(params.xi * out.w.col(t - 1) + innov * u);
    }
  }
  out.log_y.resize(n, T);
  const double sigma = std::sqrt(params.sigma2);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::VectorXd h = design.row(time_offset + static_cast<std::size_t>(t));
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t c = params.assignments.empty() ? 0 : params.assignments[static_cast<std::size_t>(i)];
      const double seasonal = design.dim() > 0 ? h.dot(params.betas.at(c)) : 0.0;
      out.log_y(i, t) = params.beta0 + seasonal + out.w(i, t) + sigma * standard_normal(rng);
    }
  }
  out.y = Trace(out.log_y.array().exp().matrix());
  return out;
}

}  // namespace strelcast::model
