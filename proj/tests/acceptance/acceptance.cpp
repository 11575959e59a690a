// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any
// fails. Pass criterion numbers as arguments to run a subset.

#include "strelcast/assess.hpp"
#include "strelcast/errors.hpp"
#include "strelcast/gibbs.hpp"
#include "strelcast/leroux.hpp"
#include "strelcast/monitor.hpp"
#include "strelcast/pipeline.hpp"
#include "strelcast/predictive.hpp"
#include "strelcast/properties.hpp"
#include "strelcast/simulate.hpp"
#include "strelcast/spatial.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <numbers>
#include <set>
#include <sstream>

using namespace strelcast;
using namespace strelcast::strel;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr int kSignTriples = 1000;
constexpr double kSignEps = 1e-9;
constexpr double kSignSeconds = 60.0;
constexpr int kOracleFields = 200;
constexpr std::size_t kOracleMaxHops = 3;
constexpr double kOracleSeconds = 60.0;
constexpr int kP4Traces = 100;
constexpr double kLerouxTol = 1e-12;
constexpr double kXiTol = 0.1;
constexpr double kVarianceRelTol = 0.25;
constexpr double kRhoMin = 0.6;
constexpr double kGibbsSeconds = 600.0;
constexpr int kBnpReplications = 10;
constexpr int kBnpRequired = 9;
constexpr double kBnpMinAri = 0.9;
constexpr double kLpdsTol1000 = 0.05;
constexpr double kLpdsTol100 = 0.2;
constexpr double kPipelineSeconds = 1800.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome sign_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  gen::FormulaOptions opts;
  opts.max_depth = 4;
  opts.max_time = 6;
  std::size_t checked = 0, mismatches = 0;
  for (int trial = 0; trial < kSignTriples; ++trial) {
    const auto grid = trial % 2 == 0 ? SpatialGrid::queen(4, 4) : gen::random_graph(rng, 4, 4, 0.25);
    const auto f = gen::random_formula(rng, opts);
    const auto horizon = std::uniform_int_distribution<std::size_t>(temporal_depth(f), 6)(rng);
    const auto trace = gen::random_trace(rng, grid.size(), horizon);
    const auto labels = gen::random_labels(rng, grid.size(), opts.labels);
    const auto b = boolean_monitor(f, trace, grid, labels).values;
    const auto r = quantitative_monitor(f, trace, grid, labels).values;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (std::abs(r[i]) <= kSignEps) continue;
      ++checked;
      if ((b[i] == 1.0) != (r[i] > 0.0)) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kSignSeconds,
          std::to_string(kSignTriples) + " triples, " + std::to_string(checked) + " location verdicts, " +
              std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s"};
}

Outcome route_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> level(-8, 8);
  std::size_t comparisons = 0, mismatches = 0;
  const auto as_bool = [](const Eigen::VectorXd& v) {
    std::vector<bool> b;
    for (Eigen::Index i = 0; i < v.size(); ++i) b.push_back(v[i] > 0.0);
    return b;
  };
  const auto bool_vec = [](const std::vector<bool>& b) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) v[static_cast<Eigen::Index>(i)] = b[i];
    return v;
  };
  for (int rows = 1; rows <= 3; ++rows) {
    for (int cols = 1; cols <= 3; ++cols) {
      const auto grid = SpatialGrid::queen(rows, cols);
      const StaticLabels none(grid.size());
      for (int field = 0; field < kOracleFields; ++field) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(grid.size()), 2);
        for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = level(rng) / 4.0;
        const Trace trace(v);
        const Eigen::VectorXd r1 = v.col(0);
        const Eigen::VectorXd r2 = v.col(1);
        const auto phi1 = greater(0);
        const auto phi2 = eventually(1, 1, greater(0));
        for (std::size_t d = 0; d <= kOracleMaxHops; ++d) {
          const auto f = reach(phi1, d, phi2);
          comparisons += 2;
          mismatches += quantitative_monitor(f, trace, grid, none).values != oracle::reach_robustness(grid, r1, r2, d);
          mismatches += boolean_monitor(f, trace, grid, none).values !=
                        bool_vec(oracle::reach_boolean(grid, as_bool(r1), as_bool(r2), d));
          for (std::size_t lo = 0; lo <= d; ++lo) {
            const auto e = escape(lo, d, phi1);
            comparisons += 2;
            mismatches += quantitative_monitor(e, trace, grid, none).values != oracle::escape_robustness(grid, r1, lo, d);
            mismatches += boolean_monitor(e, trace, grid, none).values !=
                          bool_vec(oracle::escape_boolean(grid, as_bool(r1), lo, d));
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleSeconds,
          "9 grid shapes x " + std::to_string(kOracleFields) + " fields, " + std::to_string(comparisons) +
              " field comparisons, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s"};
}

Outcome p4_structure() {
  std::mt19937_64 rng(303);
  const auto grid = SpatialGrid::queen(5, 5);
  StaticLabels labels(grid.size());
  const std::vector<LocationId> hospitals{0, 12, 19};
  labels.add(kHospitalLabel, hospitals);
  const auto p0 = build_p4(500, 0);
  const auto p4 = build_p4(500, 4);
  bool ok = temporal_depth(p4) == 4;
  std::size_t base_mismatch = 0, hospital_fail = 0, horizon_errors = 0;
  for (int k = 0; k < kP4Traces; ++k) {
    const auto trace = gen::random_trace(rng, grid.size(), 4, 0.0, 1000.0);
    for (auto mode : {MonitorMode::boolean, MonitorMode::robustness}) {
      const auto run = [&](const Formula& f, const Trace& t) {
        return mode == MonitorMode::boolean ? boolean_monitor(f, t, grid, labels) : quantitative_monitor(f, t, grid, labels);
      };
      base_mismatch += run(p0, trace).values != run(label(kHospitalLabel), trace).values;
    }
    const auto sat = boolean_monitor(p4, trace, grid, labels).values;
    for (auto h : hospitals) hospital_fail += sat[static_cast<Eigen::Index>(h)] != 1.0;
    try {
      (void)boolean_monitor(p4, trace.slice(0, 4), grid, labels);
    } catch (const HorizonError& e) {
      horizon_errors += e.required() == 4 && e.available() == 3;
    }
  }
  ok = ok && base_mismatch == 0 && hospital_fail == 0 && horizon_errors == static_cast<std::size_t>(kP4Traces);
  return {ok, "P4(c,0) vs label mismatches " + std::to_string(base_mismatch) + ", temporal depth of P4(c,4) = " +
                  std::to_string(temporal_depth(p4)) + ", horizon-3 rejections " + std::to_string(horizon_errors) + "/" +
                  std::to_string(kP4Traces) + ", unsatisfied hospitals " + std::to_string(hospital_fail)};
}

Outcome leroux_identities() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  int grids = 0;
  for (int rows = 1; rows <= 10; ++rows) {
    for (int cols = 1; cols <= 10; ++cols) {
      const auto grid = SpatialGrid::queen(rows, cols);
      const auto n = static_cast<Eigen::Index>(grid.size());
      const Eigen::MatrixXd w(grid.adjacency_matrix());
      Eigen::MatrixXd lap = -w;
      lap.diagonal() = w.rowwise().sum();
      const Eigen::MatrixXd q0(model::leroux_precision(0.0, grid));
      const Eigen::MatrixXd q1(model::leroux_precision(1.0, grid));
      worst = std::max(worst, (q0 - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
      worst = std::max(worst, (q1 - lap).cwiseAbs().maxCoeff());
      for (int k = 0; k < 3; ++k) {
        const double rho = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Eigen::MatrixXd q(model::leroux_precision(rho, grid));
        worst = std::max(worst, (q.rowwise().sum().array() - (1.0 - rho)).abs().maxCoeff());
      }
      ++grids;
    }
  }
  return {worst <= kLerouxTol, std::to_string(grids) + " grids up to 10x10, worst deviation " + fmt(worst, 3)};
}

Outcome gibbs_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto grid = SpatialGrid::queen(5, 5);
  const model::HarmonicDesign design({1.0 / 24, 1.0 / 12});
  model::SimulationParams truth;
  truth.beta0 = 2.0;
  truth.betas = {(Eigen::VectorXd(4) << 0.5, -0.3, 0.2, 0.1).finished()};
  truth.xi = 0.8;
  truth.rho = 0.9;
  truth.tau2 = 1.0;
  truth.sigma2 = 0.1;
  auto rng = make_rng(505);
  const auto data = model::simulate(grid, design, truth, 400, 0, rng);
  model::ModelConfig cfg;
  cfg.variant = model::Variant::car_ar;
  cfg.harmonic = design;
  cfg.mcmc = {10000, 5000, 10, 506};
  const auto fit = model::gibbs_run(data.y, grid, cfg);
  omp_set_num_threads(threads);
  double xi = 0, rho = 0, tau2 = 0, sigma2 = 0;
  for (const auto& d : fit.draws) {
    xi += d.xi;
    rho += d.rho;
    tau2 += d.tau2;
    sigma2 += d.sigma2;
  }
  const double m = static_cast<double>(fit.draws.size());
  xi /= m;
  rho /= m;
  tau2 /= m;
  sigma2 /= m;
  const double secs = seconds_since(t0);
  const bool ok = fit.draws.size() == 500 && std::abs(xi - 0.8) <= kXiTol && std::abs(tau2 - 1.0) <= kVarianceRelTol &&
                  std::abs(sigma2 - 0.1) / 0.1 <= kVarianceRelTol && rho >= kRhoMin && secs <= kGibbsSeconds;
  return {ok, "xi " + fmt(xi) + ", rho " + fmt(rho) + ", tau2 " + fmt(tau2) + ", sigma2 " + fmt(sigma2) + " from " +
                  std::to_string(fit.draws.size()) + " draws, " + fmt(secs, 3) + " s single-threaded"};
}

Outcome bnp_recovery() {
  const auto grid = SpatialGrid::queen(7, 7);
  const model::HarmonicDesign design({1.0 / 48});
  model::ModelConfig cfg;
  cfg.variant = model::Variant::car_ar_bnp;
  cfg.harmonic = design;
  // Prior sd of each coefficient is sqrt(0.1) = 0.316; the closest centres are 2.0 apart.
  const std::vector<Eigen::VectorXd> centres{Eigen::Vector2d(1.2, 0.0), Eigen::Vector2d(-1.2, 0.0),
                                             Eigen::Vector2d(0.0, 1.6)};
  int successes = 0;
  std::ostringstream aris;
  double occupied3 = 0.0;
  for (int rep = 0; rep < kBnpReplications; ++rep) {
    auto rng = make_rng(606, {static_cast<std::uint64_t>(rep)});
    model::SimulationParams truth;
    truth.beta0 = 3.0;
    truth.betas = centres;
    for (std::size_t i = 0; i < grid.size(); ++i) truth.assignments.push_back(std::min<std::size_t>(2, static_cast<std::size_t>(3.0 * uniform01(rng))));
    truth.xi = 0.5;
    truth.rho = 0.5;
    truth.tau2 = 0.05;
    truth.sigma2 = 0.05;
    const auto data = model::simulate(grid, design, truth, 144, 0, rng);
    cfg.mcmc = {1500, 500, 5, 607 + static_cast<std::uint64_t>(rep)};
    const auto fit = model::gibbs_run(data.y, grid, cfg);
    std::vector<assess::Partition> parts;
    for (const auto& d : fit.draws) {
      parts.push_back(d.assignments);
      occupied3 += d.n_clusters() >= 3;
    }
    const double ari = assess::adjusted_rand_index(assess::binder_partition(parts).partition, truth.assignments);
    successes += ari >= kBnpMinAri;
    aris << (rep ? " " : "") << fmt(ari, 3);
  }
  occupied3 /= kBnpReplications * static_cast<double>(cfg.mcmc.n_draws());
  return {successes >= kBnpRequired, std::to_string(successes) + "/" + std::to_string(kBnpReplications) +
                                         " replications with ARI >= " + fmt(kBnpMinAri) + " (ARI: " + aris.str() +
                                         "), draws with >= 3 clusters " + fmt(100 * occupied3, 3) + "%"};
}

// Conjugate toy: log y ~ N(mu, s2) with known s2 and mu ~ N(0, v0). After n observations
// the posterior is N(m, v) and the predictive of a new log y is N(m, v + s2).
Outcome lpds_oracle() {
  const double s2 = 1.0, v0 = 100.0;
  constexpr int n_obs = 20;
  auto data_rng = make_rng(708);
  double sum = 0.0;
  for (int k = 0; k < n_obs; ++k) sum += 1.5 + std::sqrt(s2) * standard_normal(data_rng);
  const double v = 1.0 / (1.0 / v0 + n_obs / s2);
  const double m = v * sum / s2;
  const auto grid = SpatialGrid::queen(1, 1);
  const model::LaplacianBasis basis(grid);
  const auto run = [&](int M) {
    model::FitResult fit;
    fit.variant = model::Variant::baseline;
    fit.harmonic = model::HarmonicDesign(std::vector<double>{});
    fit.n_times = n_obs;
    auto rng = make_rng(707, {static_cast<std::uint64_t>(M)});
    for (int k = 0; k < M; ++k) {
      model::PosteriorDraw d;
      d.beta0 = m + std::sqrt(v) * standard_normal(rng);
      d.betas = {Eigen::VectorXd(0)};
      d.assignments = {0};
      d.w_last = Eigen::VectorXd::Zero(1);
      d.sigma2 = s2;
      fit.draws.push_back(d);
    }
    double worst = 0.0;
    for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
      const double x = m + z * std::sqrt(v + s2);
      const double analytic = oracle::normal_log_density(x, m, v + s2);
      const double mc = model::lpds(fit, 1, Eigen::VectorXd::Constant(1, std::exp(x)), basis);
      worst = std::max(worst, std::abs(mc - analytic));
    }
    return worst;
  };
  const double e1000 = run(1000);
  const double e100 = run(100);
  return {e1000 < kLpdsTol1000 && e100 < kLpdsTol100,
          "max |MC - analytic| over 5 points: " + fmt(e1000, 3) + " at M=1000, " + fmt(e100, 3) + " at M=100"};
}

Outcome measure_fixtures() {
  const auto field = [](MonitorMode mode, std::initializer_list<double> v) {
    VerificationField f;
    f.mode = mode;
    f.values = Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
    return f;
  };
  const std::vector<VerificationField> pred{field(MonitorMode::boolean, {1, 0, 0, 0})};
  const auto obs = field(MonitorMode::boolean, {1, 1, 0, 0});
  const double acc = assess::satisfaction_accuracy(pred, obs).mean;
  const double f1 = assess::satisfaction_f1(pred, obs).mean;
  const std::vector<VerificationField> rp{field(MonitorMode::robustness, {3})};
  const double rmse = assess::robustness_rmse(rp, field(MonitorMode::robustness, {1}));
  return {acc == 0.25 && f1 == 2.0 / 3.0 && rmse == 2.0,
          "accuracy " + fmt(acc, 17) + ", F1 " + fmt(f1, 17) + ", RMSE " + fmt(rmse, 17)};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

struct PipelineRun {
  PipelineSetup setup;
  PipelineResult result;
  fs::path out;
  double seconds = 0.0;
};

PipelineRun run_bundled(const fs::path& out, int workers) {
  PipelineRun run;
  run.setup = load_pipeline_config(fs::path(STRELCAST_DATA_DIR) / "pipeline.json", 10.0);
  run.setup.config.workers = workers;
  const auto trace = load_trace_csv(*run.setup.data);
  const auto spec = load_grid_json(*run.setup.grid);
  fs::remove_all(out);
  run.out = out;
  const auto t0 = std::chrono::steady_clock::now();
  run.result = run_pipeline(run.setup.config, trace, spec, out);
  run.seconds = seconds_since(t0);
  return run;
}

std::optional<PipelineRun> bundled_run;

const PipelineRun& bundled() {
  if (!bundled_run) bundled_run = run_bundled(fs::temp_directory_path() / "strelcast_acceptance_a", 1);
  return *bundled_run;
}

Outcome end_to_end() {
  const auto& run = bundled();
  using model::Variant;
  const auto& cfg = run.setup.config;
  const double bf = run.result.final_log_bayes_factor(Variant::car_ar, 1);
  const double acc_car = run.result.window_average(cfg, Variant::car_ar, "P1", "accuracy", "mean");
  const double acc_base = run.result.window_average(cfg, Variant::baseline, "P1", "accuracy", "mean");
  const bool ok = run.result.failures.empty() && cfg.n_windows == 10 && bf > 0.0 && acc_car > acc_base &&
                  run.seconds <= kPipelineSeconds;
  return {ok, std::to_string(cfg.n_windows) + " one-step windows: cumulative log BF (car_ar vs baseline, h=1) " +
                  fmt(bf, 6) + ", P1 accuracy car_ar " + fmt(acc_car) + " vs baseline " + fmt(acc_base) + ", " +
                  std::to_string(run.result.failures.size()) + " failed tasks, " + fmt(run.seconds, 3) + " s"};
}

Outcome determinism() {
  const auto& first = bundled();
  const auto second = run_bundled(fs::temp_directory_path() / "strelcast_acceptance_b", 2);
  const auto a = read_tree(first.out);
  const auto b = read_tree(second.out);
  std::size_t differing = 0;
  for (const auto& [name, content] : a) {
    const auto it = b.find(name);
    differing += it == b.end() || it->second != content;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  return {!a.empty() && differing == 0, std::to_string(a.size()) + " output files compared between a 1-worker and a "
                                        "2-worker run with the same seed, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"monitor sign-consistency", sign_consistency},
      {"reach/escape oracle equivalence", route_oracle},
      {"P4 structural check", p4_structure},
      {"Leroux identities", leroux_identities},
      {"Gibbs recovery", gibbs_recovery},
      {"BNP recovery", bnp_recovery},
      {"LPDS oracle", lpds_oracle},
      {"measure fixtures", measure_fixtures},
      {"end-to-end directional check", end_to_end},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[k].first << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
