// Gibbs sub-steps against their closed-form or numerically integrated full conditionals,
// a Geweke joint-distribution test, and parameter recovery on simulated data.

#include "strelcast/assess.hpp"
#include "strelcast/errors.hpp"
#include "strelcast/gibbs.hpp"
#include "strelcast/simulate.hpp"

#include "support/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace strelcast;
using namespace strelcast::model;

namespace {

ModelConfig small_config(Variant v) {
  ModelConfig c;
  c.variant = v;
  c.harmonic = HarmonicDesign({0.25});
  c.hyper.s0_scale = 1.0;
  c.hyper.beta0_var = 4.0;
  c.hyper.a_sigma = 4.0;
  c.hyper.b_sigma = 3.0;
  c.hyper.a_tau = 4.0;
  c.hyper.b_tau = 3.0;
  return c;
}

Eigen::MatrixXd random_log_y(Rng& rng, Eigen::Index n, Eigen::Index t) {
  return (standard_normal_matrix(rng, n, t).array() + 2.0).matrix();
}

Eigen::MatrixXd dense_ar1(double xi, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    a(t, t) = (t == 0 || t == n - 1) ? 1.0 : 1.0 + xi * xi;
    if (t + 1 < n) a(t, t + 1) = a(t + 1, t) = -xi;
  }
  return a / (1.0 - xi * xi);
}

Eigen::MatrixXd dense_leroux(double rho, const SpatialGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd q = (1.0 - rho) * Eigen::MatrixXd::Identity(n, n);
  for (LocationId i = 0; i < g.size(); ++i) {
    q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += rho * static_cast<double>(g.degree(i));
    for (auto j : g.neighbors(i)) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= rho;
  }
  return q;
}

/// log N(vec w; 0, (kron(A_xi, Q_rho) / tau2)^-1) up to the 2π term.
double dense_latent_log_density(const Eigen::MatrixXd& w, const SpatialGrid& g, double xi, double rho, double tau2) {
  const auto T = static_cast<int>(w.cols());
  const auto I = static_cast<double>(w.rows());
  const Eigen::MatrixXd a = dense_ar1(xi, T);
  const Eigen::MatrixXd q = dense_leroux(rho, g);
  double quad = 0.0;
  for (int s = 0; s < T; ++s) {
    for (int t = 0; t < T; ++t) quad += a(s, t) * w.col(s).dot(q * w.col(t));
  }
  const double logdet = I * std::log(a.determinant()) + T * std::log(q.determinant()) - I * T * std::log(tau2);
  return 0.5 * logdet - 0.5 * quad / tau2;
}

}  // namespace

TEST(GibbsSteps, InterceptMatchesConjugatePosterior) {
  const auto g = SpatialGrid::queen(2, 3);
  auto rng = make_rng(1);
  const auto log_y = random_log_y(rng, 6, 10);
  const auto cfg = small_config(Variant::car_ar);
  Sampler s(log_y, g, cfg, 0, make_rng(2));
  s.update_latent();
  s.state().sigma2 = 0.3;
  s.state().betas[0] = Eigen::Vector2d(0.4, -0.2);
  const Eigen::MatrixXd fit = Eigen::VectorXd::Ones(6) * (s.design() * s.state().betas[0]).transpose();
  const double prec = 1.0 / 4.0 + 60.0 / 0.3;
  const double mean = (log_y - fit - s.state().w).sum() / 0.3 / prec;
  std::vector<double> draws;
  for (int k = 0; k < 40000; ++k) {
    s.update_beta0();
    draws.push_back(s.state().beta0);
  }
  EXPECT_NEAR(stats::mean(draws), mean, 4.0 * std::sqrt(1.0 / prec / 40000));
  EXPECT_NEAR(stats::variance(draws), 1.0 / prec, 0.03 / prec);
}

TEST(GibbsSteps, CoefficientsMatchConjugatePosterior) {
  const auto g = SpatialGrid::queen(2, 2);
  auto rng = make_rng(3);
  const auto log_y = random_log_y(rng, 4, 12);
  auto cfg = small_config(Variant::car_ar);
  cfg.hyper.m0 = Eigen::Vector2d(0.5, -0.5);
  cfg.hyper.S0 = Eigen::Matrix2d{{0.5, 0.1}, {0.1, 0.3}};
  Sampler s(log_y, g, cfg, 3, make_rng(4));
  s.update_latent();
  s.state().sigma2 = 0.8;
  s.state().beta0 = 1.7;

  // Design written out independently: rows (cos(pi t / 2), sin(pi t / 2)) at t = 3..14.
  Eigen::MatrixXd H(12, 2);
  for (int t = 0; t < 12; ++t) H.row(t) << std::cos(M_PI * (t + 3) / 2.0), std::sin(M_PI * (t + 3) / 2.0);
  const Eigen::Matrix2d S0inv = cfg.hyper.S0.inverse();
  Eigen::Matrix2d prec = S0inv + 4.0 * H.transpose() * H / 0.8;
  Eigen::Vector2d lin = S0inv * cfg.hyper.m0;
  for (int i = 0; i < 4; ++i) lin += H.transpose() * (log_y.row(i).transpose().array() - 1.7 - s.state().w.row(i).transpose().array()).matrix() / 0.8;
  const Eigen::Vector2d mean = prec.inverse() * lin;
  const Eigen::Matrix2d cov = prec.inverse();

  const int n = 40000;
  std::vector<double> b0, b1;
  for (int k = 0; k < n; ++k) {
    s.update_betas();
    b0.push_back(s.state().betas[0][0]);
    b1.push_back(s.state().betas[0][1]);
  }
  EXPECT_NEAR(stats::mean(b0), mean[0], 4.0 * std::sqrt(cov(0, 0) / n));
  EXPECT_NEAR(stats::mean(b1), mean[1], 4.0 * std::sqrt(cov(1, 1) / n));
  EXPECT_NEAR(stats::variance(b0), cov(0, 0), 0.03 * cov(0, 0));
  EXPECT_NEAR(stats::variance(b1), cov(1, 1), 0.03 * cov(1, 1));
}

TEST(GibbsSteps, VariancesMatchInverseGammaPosteriors) {
  const auto g = SpatialGrid::queen(2, 2);
  auto rng = make_rng(5);
  const auto log_y = random_log_y(rng, 4, 8);
  const auto cfg = small_config(Variant::car_ar);
  Sampler s(log_y, g, cfg, 0, make_rng(6));
  s.state().xi = 0.6;
  s.state().rho = 0.7;
  s.update_latent();
  const auto& st = s.state();
  const Eigen::MatrixXd fit = Eigen::VectorXd::Ones(4) * (s.design() * st.betas[0]).transpose();
  const double sse = ((log_y - fit - st.w).array() - st.beta0).square().sum();
  const double quad = -2.0 * dense_latent_log_density(st.w, g, 0.6, 0.7, 1.0) +
                      std::log(dense_ar1(0.6, 8).determinant()) * 4 + std::log(dense_leroux(0.7, g).determinant()) * 8;
  const double shape = 4.0 + 16.0;
  std::vector<double> sig, tau;
  for (int k = 0; k < 40000; ++k) {
    s.update_variances();
    sig.push_back(s.state().sigma2);
    tau.push_back(s.state().tau2);
  }
  const double sig_mean = (3.0 + 0.5 * sse) / (shape - 1.0);
  const double tau_mean = (3.0 + 0.5 * quad) / (shape - 1.0);
  EXPECT_NEAR(stats::mean(sig), sig_mean, 0.01 * sig_mean);
  EXPECT_NEAR(stats::mean(tau), tau_mean, 0.01 * tau_mean);
  EXPECT_NEAR(stats::variance(tau), tau_mean * tau_mean / (shape - 2.0), 0.05 * tau_mean * tau_mean / (shape - 2.0));
}

TEST(GibbsSteps, RhoXiMatchGridIntegratedPosterior) {
  const auto g = SpatialGrid::queen(2, 3);
  const HarmonicDesign design({0.25});
  SimulationParams truth;
  truth.betas = {Eigen::Vector2d::Zero()};
  truth.xi = 0.6;
  truth.rho = 0.8;
  truth.tau2 = 1.0;
  truth.sigma2 = 0.05;
  auto rng = make_rng(7);
  const auto data = simulate(g, design, truth, 8, 0, rng);
  const auto cfg = small_config(Variant::car_ar);
  Sampler s(data.log_y, g, cfg, 0, make_rng(8));
  s.state() = s.state();
  s.state().xi = 0.6;
  s.state().rho = 0.8;
  s.state().tau2 = 1.0;
  s.state().sigma2 = 0.05;
  s.update_latent();
  const Eigen::MatrixXd w = s.state().w;

  // Midpoint-rule posterior means of rho ~ U(0,1), xi ~ U(-1,1).
  const int nr = 200, nx = 400;
  std::vector<double> logp(nr * nx);
  double top = -1e300;
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nx; ++b) {
      const double rho = (a + 0.5) / nr;
      const double xi = -1.0 + 2.0 * (b + 0.5) / nx;
      logp[a * nx + b] = dense_latent_log_density(w, g, xi, rho, 1.0);
      top = std::max(top, logp[a * nx + b]);
    }
  }
  double z = 0, m_rho = 0, m_xi = 0;
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nx; ++b) {
      const double p = std::exp(logp[a * nx + b] - top);
      z += p;
      m_rho += p * (a + 0.5) / nr;
      m_xi += p * (-1.0 + 2.0 * (b + 0.5) / nx);
    }
  }
  m_rho /= z;
  m_xi /= z;

  std::vector<double> rhos, xis;
  for (int k = 0; k < 200000; ++k) {
    s.update_rho_xi();
    if (k % 200 == 0) s.adapt_proposals();
    rhos.push_back(s.state().rho);
    xis.push_back(s.state().xi);
  }
  EXPECT_NEAR(stats::mean(rhos), m_rho, 4.0 * stats::batch_se(rhos) + 1e-3);
  EXPECT_NEAR(stats::mean(xis), m_xi, 4.0 * stats::batch_se(xis) + 1e-3);
  EXPECT_EQ(s.state().w, w);
}

TEST(GibbsSteps, RhoFixedVariantKeepsRho) {
  const auto g = SpatialGrid::queen(2, 2);
  auto rng = make_rng(9);
  auto cfg = small_config(Variant::car_ar_rho_fixed);
  cfg.rho0 = 0.35;
  Sampler s(random_log_y(rng, 4, 10), g, cfg, 0, make_rng(10));
  for (int k = 0; k < 50; ++k) s.sweep();
  EXPECT_EQ(s.state().rho, 0.35);
}

TEST(GibbsSteps, BaselineHasNoLatentField) {
  const auto g = SpatialGrid::queen(2, 2);
  auto rng = make_rng(11);
  Sampler s(random_log_y(rng, 4, 10), g, small_config(Variant::baseline), 0, make_rng(12));
  for (int k = 0; k < 20; ++k) s.sweep();
  const auto d = s.snapshot(true);
  EXPECT_EQ(d.w, Eigen::MatrixXd::Zero(4, 10));
  EXPECT_EQ(d.w_last, Eigen::VectorXd::Zero(4));
  EXPECT_EQ(d.xi, 0.0);
  EXPECT_EQ(d.rho, 0.0);
  EXPECT_EQ(d.tau2, 0.0);
  EXPECT_EQ(s.snapshot(false).w.size(), 0);
}

// Marginal-conditional vs successive-conditional simulation of the joint (theta, y).
TEST(Geweke, JointDistributionOfCarAr) {
  const auto g = SpatialGrid::queen(2, 2);
  const auto cfg = small_config(Variant::car_ar);
  const HarmonicDesign& design = cfg.harmonic;
  const int T = 6;
  auto rng = make_rng(13);

  const auto prior_draw = [&](Rng& r) {
    SimulationParams p;
    p.beta0 = 2.0 * standard_normal(r);
    p.betas = {standard_normal_vector(r, 2)};
    p.xi = -1.0 + 2.0 * uniform01(r);
    p.rho = uniform01(r);
    p.tau2 = inverse_gamma(r, 4.0, 3.0);
    p.sigma2 = inverse_gamma(r, 4.0, 3.0);
    return p;
  };
  using Fn = std::function<double(const PosteriorDraw&)>;
  const std::vector<std::pair<const char*, Fn>> fns{
      {"beta0", [](const PosteriorDraw& d) { return d.beta0; }},
      {"beta1", [](const PosteriorDraw& d) { return d.betas[0][0]; }},
      {"beta2^2", [](const PosteriorDraw& d) { return d.betas[0][1] * d.betas[0][1]; }},
      {"xi", [](const PosteriorDraw& d) { return d.xi; }},
      {"xi^2", [](const PosteriorDraw& d) { return d.xi * d.xi; }},
      {"rho", [](const PosteriorDraw& d) { return d.rho; }},
      {"tau2", [](const PosteriorDraw& d) { return d.tau2; }},
      {"sigma2", [](const PosteriorDraw& d) { return d.sigma2; }},
      {"w00", [](const PosteriorDraw& d) { return d.w(0, 0); }},
      {"w^2", [](const PosteriorDraw& d) { return d.w.squaredNorm() / static_cast<double>(d.w.size()); }},
  };
  const int n = 30000;
  std::vector<std::vector<double>> marginal(fns.size()), successive(fns.size());

  for (int k = 0; k < n; ++k) {
    const auto p = prior_draw(rng);
    const auto sim = simulate(g, design, p, T, 0, rng);
    PosteriorDraw d;
    d.beta0 = p.beta0;
    d.betas = p.betas;
    d.xi = p.xi;
    d.rho = p.rho;
    d.tau2 = p.tau2;
    d.sigma2 = p.sigma2;
    d.w = sim.w;
    for (std::size_t f = 0; f < fns.size(); ++f) marginal[f].push_back(fns[f].second(d));
  }

  const auto p0 = prior_draw(rng);
  PosteriorDraw cur;
  cur.beta0 = p0.beta0;
  cur.betas = p0.betas;
  cur.assignments.assign(4, 0);
  cur.xi = p0.xi;
  cur.rho = p0.rho;
  cur.tau2 = p0.tau2;
  cur.sigma2 = p0.sigma2;
  cur.w = simulate(g, design, p0, T, 0, rng).w;
  const Eigen::MatrixXd H = design.matrix(0, T);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd log_y = (cur.w + Eigen::VectorXd::Ones(4) * (H * cur.betas[0]).transpose()).array() + cur.beta0;
    log_y += std::sqrt(cur.sigma2) * standard_normal_matrix(rng, 4, T);
    Sampler s(log_y, g, cfg, 0, make_rng(14, {static_cast<std::uint64_t>(k)}));
    s.state() = cur;
    s.update_betas();
    s.update_beta0();
    s.update_latent();
    for (int r = 0; r < 10; ++r) s.update_rho_xi();
    s.update_variances();
    cur = s.state();
    for (std::size_t f = 0; f < fns.size(); ++f) successive[f].push_back(fns[f].second(cur));
  }

  for (std::size_t f = 0; f < fns.size(); ++f) {
    const double se = std::hypot(std::sqrt(stats::variance(marginal[f]) / n), stats::batch_se(successive[f]));
    EXPECT_NEAR(stats::mean(successive[f]), stats::mean(marginal[f]), 4.0 * se) << fns[f].first;
  }
}

TEST(GibbsRun, BaselineRecovery) {
  const auto g = SpatialGrid::queen(3, 3);
  const HarmonicDesign design({1.0 / 24, 0.25});
  SimulationParams truth;
  truth.beta0 = 3.0;
  truth.betas = {Eigen::Vector4d(0.5, -0.3, 0.2, 0.1)};
  truth.sigma2 = 0.04;
  auto rng = make_rng(15);
  const auto data = simulate(g, design, truth, 240, 0, rng);

  ModelConfig cfg;
  cfg.variant = Variant::baseline;
  cfg.harmonic = design;
  cfg.mcmc = {2000, 1000, 2, 16};
  const auto fit = gibbs_run(data.y, g, cfg);
  ASSERT_EQ(fit.draws.size(), 500u);
  EXPECT_EQ(fit.n_times, 240u);
  EXPECT_EQ(fit.forecast_time(1), 240u);
  double b0 = 0, s2 = 0;
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  for (const auto& d : fit.draws) {
    b0 += d.beta0;
    s2 += d.sigma2;
    b += d.betas[0];
    EXPECT_EQ(d.n_clusters(), 1u);
  }
  const double m = static_cast<double>(fit.draws.size());
  EXPECT_NEAR(b0 / m, 3.0, 0.01);
  EXPECT_NEAR(s2 / m, 0.04, 0.004);
  EXPECT_LE((b / m - truth.betas[0]).cwiseAbs().maxCoeff(), 0.02);
}

TEST(GibbsRun, SeededAndValidated) {
  const auto g = SpatialGrid::queen(2, 2);
  auto rng = make_rng(17);
  const Trace y(random_log_y(rng, 4, 20).array().exp().matrix());
  auto cfg = small_config(Variant::car_ar);
  cfg.mcmc = {60, 20, 4, 3};
  const auto a = gibbs_run(y, g, cfg);
  const auto b = gibbs_run(y, g, cfg);
  ASSERT_EQ(a.draws.size(), 10u);
  for (std::size_t m = 0; m < a.draws.size(); ++m) {
    EXPECT_EQ(a.draws[m].w_last, b.draws[m].w_last);
    EXPECT_EQ(a.draws[m].sigma2, b.draws[m].sigma2);
  }
  cfg.mcmc.seed = 4;
  EXPECT_NE(gibbs_run(y, g, cfg).draws[0].sigma2, a.draws[0].sigma2);

  Eigen::MatrixXd bad = y.values();
  bad(2, 5) = 0.0;
  EXPECT_THROW((void)gibbs_run(Trace(bad), g, cfg), DataError);
  cfg.mcmc.burnin = cfg.mcmc.iters;
  EXPECT_THROW((void)gibbs_run(y, g, cfg), std::invalid_argument);
  cfg = small_config(Variant::car_ar);
  EXPECT_THROW((void)gibbs_run(Trace(y.values().leftCols(5)), g, cfg), std::invalid_argument);
}

TEST(GibbsRun, BnpSeparatesTwoGroups) {
  const auto g = SpatialGrid::queen(4, 4);
  const HarmonicDesign design({1.0 / 12});
  SimulationParams truth;
  truth.beta0 = 2.0;
  truth.betas = {Eigen::Vector2d(1.5, 0.0), Eigen::Vector2d(-1.5, 0.5)};
  for (std::size_t i = 0; i < 16; ++i) truth.assignments.push_back(i % 4 < 2 ? 0 : 1);
  truth.xi = 0.5;
  truth.rho = 0.5;
  truth.tau2 = 0.02;
  truth.sigma2 = 0.02;
  auto rng = make_rng(18);
  const auto data = simulate(g, design, truth, 96, 0, rng);

  ModelConfig cfg;
  cfg.variant = Variant::car_ar_bnp;
  cfg.harmonic = design;
  cfg.hyper.s0_scale = 1.0;
  cfg.mcmc = {600, 300, 3, 19};
  const auto fit = gibbs_run(data.y, g, cfg);
  std::vector<assess::Partition> parts;
  for (const auto& d : fit.draws) parts.push_back(d.assignments);
  const auto est = assess::binder_partition(parts);
  EXPECT_DOUBLE_EQ(assess::adjusted_rand_index(est.partition, truth.assignments), 1.0);
}
