#include "strelcast/latent_field.hpp"

#include "strelcast/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace strelcast::model {

namespace {

// Draws x ~ N(P⁻¹ b, P⁻¹) for P = c·A_ξ + s·I. Overwrites b with the draw and, if requested,
// `mean` with P⁻¹ b.
void tridiagonal_draw(double c, double s, double xi, Eigen::Ref<Eigen::VectorXd> b,
                      Eigen::Ref<const Eigen::VectorXd> z, Eigen::VectorXd* mean) {
  const auto n = b.size();
  const double inv = 1.0 / (1.0 - xi * xi);
  const double off = -c * xi * inv;
  std::vector<double> l(static_cast<std::size_t>(n));
  double prev = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const bool edge = n == 1 || t == 0 || t == n - 1;
    const double a = n == 1 ? 1.0 : (edge ? inv : (1.0 + xi * xi) * inv);
    const double m = t == 0 ? 0.0 : off / prev;
    const double d = c * a + s - m * m;
    if (!(d > 0.0)) throw NumericalError("latent field precision lost positive definiteness");
    l[static_cast<std::size_t>(t)] = std::sqrt(d);
    prev = l[static_cast<std::size_t>(t)];
  }
  const auto lt = [&](Eigen::Index t) { return l[static_cast<std::size_t>(t)]; };
  // Forward solve L y = b.
  for (Eigen::Index t = 0; t < n; ++t) {
    const double m = t == 0 ? 0.0 : off / lt(t - 1);
    b[t] = (b[t] - (t == 0 ? 0.0 : m * b[t - 1])) / lt(t);
  }
  const auto back = [&](Eigen::Ref<Eigen::VectorXd> y) {
    for (Eigen::Index t = n - 1; t >= 0; --t) {
      const double m_next = t + 1 < n ? off / lt(t) : 0.0;
      y[t] = (y[t] - (t + 1 < n ? m_next * y[t + 1] : 0.0)) / lt(t);
    }
  };
  if (mean != nullptr) {
    *mean = b;
    back(*mean);
  }
  b += z;
  back(b);
}

template <bool Parallel>
Eigen::MatrixXd spectral_impl(const Eigen::MatrixXd& resid, const LaplacianBasis& basis, const LatentParams& p,
                              Rng& rng, Eigen::MatrixXd* mean_out) {
  const Eigen::Index n = resid.rows();
  const Eigen::Index T = resid.cols();
  if (basis.eigenvectors.rows() != n) throw std::invalid_argument("latent residual does not match the grid");
  if (!(p.tau2 > 0.0) || !(p.sigma2 > 0.0) || !(std::abs(p.xi) < 1.0)) {
    throw NumericalError("latent field parameters out of range");
  }
  const Eigen::MatrixXd noise = standard_normal_matrix(rng, T, n);
  // Rows of `rotated` are the eigen-coordinates; transposed so each system is a column.
  Eigen::MatrixXd rotated = (basis.eigenvectors.transpose() * resid).transpose() / p.sigma2;
  Eigen::MatrixXd means(T, mean_out != nullptr ? n : 0);
  const Eigen::VectorXd q = basis.precision_eigenvalues(p.rho);
  const double s = 1.0 / p.sigma2;

  if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXd mean;
      tridiagonal_draw(q[k] / p.tau2, s, p.xi, rotated.col(k), noise.col(k), mean_out != nullptr ? &mean : nullptr);
      if (mean_out != nullptr) means.col(k) = mean;
    }
  } else {
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXd mean;
      tridiagonal_draw(q[k] / p.tau2, s, p.xi, rotated.col(k), noise.col(k), mean_out != nullptr ? &mean : nullptr);
      if (mean_out != nullptr) means.col(k) = mean;
    }
  }
  if (mean_out != nullptr) *mean_out = basis.eigenvectors * means.transpose();
  return basis.eigenvectors * rotated.transpose();
}

}  // namespace

Eigen::SparseMatrix<double> ar1_precision(double xi, std::size_t n_times) {
  if (!(std::abs(xi) < 1.0)) throw std::invalid_argument("AR(1) coefficient must lie in (-1, 1)");
  const auto T = static_cast<Eigen::Index>(n_times);
  std::vector<Eigen::Triplet<double>> entries;
  if (T == 1) {
    entries.emplace_back(0, 0, 1.0);
  } else {
    const double inv = 1.0 / (1.0 - xi * xi);
    for (Eigen::Index t = 0; t < T; ++t) {
      const bool edge = t == 0 || t == T - 1;
      entries.emplace_back(t, t, (edge ? 1.0 : 1.0 + xi * xi) * inv);
      if (t + 1 < T && xi != 0.0) {
        entries.emplace_back(t, t + 1, -xi * inv);
        entries.emplace_back(t + 1, t, -xi * inv);
      }
    }
  }
  Eigen::SparseMatrix<double> A(T, T);
  A.setFromTriplets(entries.begin(), entries.end());
  return A;
}

Eigen::SparseMatrix<double> latent_posterior_precision(const SpatialGrid& grid, const LatentParams& p,
                                                       std::size_t n_times) {
  const auto Q = leroux_precision(p.rho, grid);
  const auto A = ar1_precision(p.xi, n_times);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto dim = n * static_cast<Eigen::Index>(n_times);
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index ta = 0; ta < A.outerSize(); ++ta) {
    for (Eigen::SparseMatrix<double>::InnerIterator a(A, ta); a; ++a) {
      for (Eigen::Index qa = 0; qa < Q.outerSize(); ++qa) {
        for (Eigen::SparseMatrix<double>::InnerIterator q(Q, qa); q; ++q) {
          entries.emplace_back(a.row() * n + q.row(), a.col() * n + q.col(), a.value() * q.value() / p.tau2);
        }
      }
    }
  }
  for (Eigen::Index k = 0; k < dim; ++k) entries.emplace_back(k, k, 1.0 / p.sigma2);
  Eigen::SparseMatrix<double> P(dim, dim);
  P.setFromTriplets(entries.begin(), entries.end());
  return P;
}

Eigen::MatrixXd sample_latent_spectral(const Eigen::MatrixXd& resid, const LaplacianBasis& basis,
                                       const LatentParams& p, Rng& rng, Eigen::MatrixXd* mean_out) {
  return spectral_impl<true>(resid, basis, p, rng, mean_out);
}

Eigen::MatrixXd sample_latent_spectral_serial(const Eigen::MatrixXd& resid, const LaplacianBasis& basis,
                                              const LatentParams& p, Rng& rng, Eigen::MatrixXd* mean_out) {
  return spectral_impl<false>(resid, basis, p, rng, mean_out);
}

Eigen::MatrixXd sample_latent_sparse(const Eigen::MatrixXd& resid, const SpatialGrid& grid, const LatentParams& p,
                                     Rng& rng, Eigen::MatrixXd* mean_out) {
  const Eigen::Index n = resid.rows();
  const Eigen::Index T = resid.cols();
  const auto P = latent_posterior_precision(grid, p, static_cast<std::size_t>(T));
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt(P);
  if (llt.info() != Eigen::Success) throw NumericalError("sparse Cholesky of the latent precision failed");
  // Column-major I×T storage is exactly the time-major stacking.
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(resid.data(), n * T) / p.sigma2;
  const Eigen::VectorXd mean = llt.solve(b);
  const Eigen::VectorXd z = standard_normal_vector(rng, n * T);
  const Eigen::VectorXd u = llt.permutationPinv() * Eigen::VectorXd(llt.matrixU().solve(z));
  const Eigen::VectorXd x = mean + u;
  if (mean_out != nullptr) *mean_out = Eigen::Map<const Eigen::MatrixXd>(mean.data(), n, T);
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, T);
}

LatentStats::LatentStats(const Eigen::MatrixXd& w, const Eigen::SparseMatrix<double>& laplacian)
    : n_locations(static_cast<std::size_t>(w.rows())), n_times(static_cast<std::size_t>(w.cols())) {
  const Eigen::MatrixXd Lw = laplacian * w;
  first_L = w.col(0).dot(Lw.col(0));
  first_I = w.col(0).squaredNorm();
  for (Eigen::Index t = 1; t < w.cols(); ++t) {
    cur_L += w.col(t).dot(Lw.col(t));
    cur_I += w.col(t).squaredNorm();
    prev_L += w.col(t - 1).dot(Lw.col(t - 1));
    prev_I += w.col(t - 1).squaredNorm();
    cross_L += w.col(t).dot(Lw.col(t - 1));
    cross_I += w.col(t).dot(w.col(t - 1));
  }
}

double LatentStats::quadratic(double xi, double rho) const {
  const auto form = [rho](double l, double i) { return rho * l + (1.0 - rho) * i; };
  const double first = form(first_L, first_I);
  const double innov = form(cur_L, cur_I) - 2.0 * xi * form(cross_L, cross_I) + xi * xi * form(prev_L, prev_I);
  return first + innov / (1.0 - xi * xi);
}

double LatentStats::log_density(double xi, double rho, double tau2, double log_det_q) const {
  const auto I = static_cast<double>(n_locations);
  const auto T = static_cast<double>(n_times);
  return -0.5 * I * T * std::log(2.0 * std::numbers::pi * tau2) + 0.5 * T * log_det_q -
         0.5 * I * (T - 1.0) * std::log(1.0 - xi * xi) - quadratic(xi, rho) / (2.0 * tau2);
}

}  // namespace strelcast::model
