// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include "strelcast/latent_field.hpp"
#include "strelcast/monitor.hpp"
#include "strelcast/predictive.hpp"
#include "strelcast/properties.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace strelcast;

namespace {

constexpr int kSide = 21;

std::vector<Trace> make_traces(std::size_t n, std::size_t horizon) {
  auto rng = make_rng(1);
  std::vector<Trace> traces;
  for (std::size_t k = 0; k < n; ++k) {
    traces.emplace_back((500.0 + 150.0 * standard_normal_matrix(rng, kSide * kSide, static_cast<Eigen::Index>(horizon + 1)).array()).matrix());
  }
  return traces;
}

template <bool Parallel>
void BM_MonitorEnsemble(benchmark::State& state) {
  const auto grid = SpatialGrid::queen(kSide, kSide);
  const StaticLabels labels(grid.size());
  const auto traces = make_traces(static_cast<std::size_t>(state.range(0)), 3);
  const auto f = strel::build_p3(500, 3, 1);
  for (auto _ : state) {
    auto out = Parallel ? strel::monitor_ensemble(f, traces, grid, labels, strel::MonitorMode::robustness)
                        : strel::monitor_ensemble_serial(f, traces, grid, labels, strel::MonitorMode::robustness);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_LatentSpectral(benchmark::State& state) {
  const auto grid = SpatialGrid::queen(kSide, kSide);
  const model::LaplacianBasis basis(grid);
  auto rng = make_rng(2);
  const Eigen::MatrixXd resid = standard_normal_matrix(rng, kSide * kSide, state.range(0));
  const model::LatentParams p{0.9, 0.8, 0.5, 0.1};
  for (auto _ : state) {
    auto w = Parallel ? model::sample_latent_spectral(resid, basis, p, rng)
                      : model::sample_latent_spectral_serial(resid, basis, p, rng);
    benchmark::DoNotOptimize(w);
  }
}

model::FitResult make_fit(std::size_t n_draws) {
  model::FitResult fit;
  fit.variant = model::Variant::car_ar;
  fit.harmonic = model::HarmonicDesign({1.0 / 144, 1.0 / 72});
  fit.n_times = 432;
  auto rng = make_rng(3);
  for (std::size_t m = 0; m < n_draws; ++m) {
    model::PosteriorDraw d;
    d.beta0 = std::log(500.0);
    d.betas = {0.1 * standard_normal_vector(rng, 4)};
    d.assignments.assign(kSide * kSide, 0);
    d.w_last = 0.3 * standard_normal_vector(rng, kSide * kSide);
    d.xi = 0.95;
    d.rho = 0.9;
    d.tau2 = 0.08;
    d.sigma2 = 0.01;
    fit.draws.push_back(std::move(d));
  }
  return fit;
}

template <bool Parallel>
void BM_PredictiveDraws(benchmark::State& state) {
  const auto grid = SpatialGrid::queen(kSide, kSide);
  const model::LaplacianBasis basis(grid);
  const auto fit = make_fit(static_cast<std::size_t>(state.range(0)));
  const Eigen::VectorXd last = Eigen::VectorXd::Constant(kSide * kSide, 500.0);
  for (auto _ : state) {
    auto out = Parallel ? model::predictive_draws(fit, 4, last, basis, 7)
                        : model::predictive_draws_serial(fit, 4, last, basis, 7);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MonitorEnsemble<false>)->Name("monitor_ensemble/serial")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonitorEnsemble<true>)->Name("monitor_ensemble/openmp")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LatentSpectral<false>)->Name("latent_spectral/serial")->Arg(432)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LatentSpectral<true>)->Name("latent_spectral/openmp")->Arg(432)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictiveDraws<false>)->Name("predictive_draws/serial")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictiveDraws<true>)->Name("predictive_draws/openmp")->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
