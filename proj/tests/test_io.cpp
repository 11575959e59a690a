// Raw-data ingestion, draw archives and JSON configuration files.

#include "strelcast/archive.hpp"
#include "strelcast/errors.hpp"
#include "strelcast/ingest.hpp"
#include "strelcast/model_config.hpp"
#include "strelcast/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace strelcast;
using namespace strelcast::model;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("strelcast_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <typename F>
std::string data_error_message(F&& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Ingest, SumsActivities) {
  IngestOptions one;
  const auto r = ingest("cell_id,time_slot,a,b,c,d,e\n0,600,1,2,3,4,5\n", one);
  EXPECT_EQ(r.trace.n_locations(), 1u);
  EXPECT_EQ(r.trace(0, 0), 15.0);
  EXPECT_EQ(r.slots, (std::vector<std::int64_t>{600}));

  // Repeated rows and empty fields.
  const auto r2 = ingest("0,0,1,,2\n0,0,3,4,\n0,10,1,1,1\n", one);
  EXPECT_EQ(r2.trace(0, 0), 10.0);
  EXPECT_EQ(r2.trace(0, 1), 3.0);
}

TEST(Ingest, SelectsSubgrid) {
  // 5x4 source grid with ids starting at 1; take rows 1..3, cols 2..3.
  std::ostringstream raw;
  for (int id = 1; id <= 20; ++id) {
    for (int slot = 0; slot < 3; ++slot) raw << id << ',' << slot * 600 << ',' << id * 10 + slot << '\n';
  }
  IngestOptions opts{4, 1, 1, 2, 3, 2};
  const auto r = ingest(raw.str(), opts);
  EXPECT_EQ(r.trace.n_locations(), 6u);
  EXPECT_EQ(r.trace.n_times(), 3u);
  EXPECT_EQ(r.spec.grid.rows(), 3);
  EXPECT_EQ(r.spec.grid.cols(), 2);
  // Location (row 0, col 0) of the subgrid is source (1, 2): id 1 + 1*4 + 2 = 7.
  EXPECT_EQ(r.spec.cell_ids.front(), 7);
  EXPECT_EQ(r.trace(0, 2), 72.0);
  EXPECT_EQ(r.spec.cell_ids.back(), 1 + 3 * 4 + 3);
}

TEST(Ingest, CentralSelectionOfLargeGrid) {
  std::ostringstream raw;
  for (int id = 0; id < 100 * 100; ++id) raw << id << ",0,1\n" << id << ",1,2\n";
  const auto r = ingest(raw.str(), IngestOptions{100, 0, 40, 40, 21, 21});
  EXPECT_EQ(r.trace.n_locations(), 441u);
  EXPECT_EQ(Eigen::VectorXd(r.trace.values().col(0)), Eigen::VectorXd::Ones(441));
  EXPECT_EQ(Eigen::VectorXd(r.trace.values().col(1)), Eigen::VectorXd::Constant(441, 2.0));
  EXPECT_EQ(r.spec.cell_ids.front(), 40 * 100 + 40);
}

TEST(Ingest, Errors) {
  IngestOptions two{2, 0, 0, 0, 1, 2};
  const auto zero = data_error_message([&] { (void)ingest("0,0,1\n1,0,0\n0,10,1\n1,10,2\n", two); });
  EXPECT_NE(zero.find("slot 0"), std::string::npos) << zero;
  EXPECT_NE(zero.find("cell 1"), std::string::npos) << zero;
  const auto gap = data_error_message([&] { (void)ingest("0,0,1\n1,0,1\n0,10,1\n1,10,1\n0,30,1\n1,30,1\n", two); });
  EXPECT_NE(gap.find("20"), std::string::npos) << gap;
  const auto missing = data_error_message([&] { (void)ingest("0,0,1\n0,10,1\n", two); });
  EXPECT_NE(missing.find("1"), std::string::npos) << missing;
  EXPECT_THROW((void)ingest("0,0\n", two), DataError);
  EXPECT_THROW((void)ingest("0,0,abc\n", two), DataError);
  EXPECT_THROW((void)ingest("", two), DataError);
}

TEST(Archive, RoundTripIsLossless) {
  Rng rng = make_rng(1);
  FitResult fit;
  fit.variant = Variant::car_ar_bnp;
  fit.harmonic = HarmonicDesign({1.0 / 144, 1.0 / 3}, 1000);
  fit.time_offset = 17;
  fit.n_times = 30;
  fit.accept_rho = 0.31;
  fit.accept_xi = 0.27;
  for (int m = 0; m < 4; ++m) {
    PosteriorDraw d;
    d.beta0 = standard_normal(rng);
    d.betas = {standard_normal_vector(rng, 4), standard_normal_vector(rng, 4) * 1e-7};
    d.assignments = {0, 1, 1, 0, 1, 0};
    d.w = standard_normal_matrix(rng, 6, 30);
    d.w_last = d.w.col(29);
    d.xi = 0.1 * m;
    d.rho = 1.0 / 3.0;
    d.tau2 = 0.7;
    d.sigma2 = 1e-300;
    fit.draws.push_back(d);
  }
  const auto dir = scratch("archive");
  save_fit(fit, dir, true);
  const auto back = load_fit(dir);
  EXPECT_EQ(back.variant, fit.variant);
  EXPECT_EQ(back.harmonic.frequencies(), fit.harmonic.frequencies());
  EXPECT_EQ(back.harmonic.max_time(), fit.harmonic.max_time());
  EXPECT_EQ(back.time_offset, 17u);
  EXPECT_EQ(back.n_times, 30u);
  EXPECT_EQ(back.accept_rho, 0.31);
  ASSERT_EQ(back.draws.size(), 4u);
  for (std::size_t m = 0; m < 4; ++m) {
    const auto& a = fit.draws[m];
    const auto& b = back.draws[m];
    EXPECT_EQ(a.beta0, b.beta0);
    EXPECT_EQ(a.betas.size(), b.betas.size());
    for (std::size_t k = 0; k < a.betas.size(); ++k) EXPECT_EQ(a.betas[k], b.betas[k]);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.w, b.w);
    EXPECT_EQ(a.w_last, b.w_last);
    EXPECT_EQ(a.xi, b.xi);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.sigma2, b.sigma2);
  }

  const auto slim = scratch("archive_slim");
  save_fit(fit, slim, false);
  EXPECT_FALSE(fs::exists(slim / "w"));
  EXPECT_EQ(load_fit(slim).draws[2].w.size(), 0);

  fs::remove(slim / "w_last.csv");
  EXPECT_THROW((void)load_fit(slim), DataError);
  EXPECT_THROW((void)load_fit(scratch("archive_empty")), DataError);
}

TEST(ModelConfigJson, RoundTripAndDefaults) {
  const auto c = parse_model_config(R"({"variant": "car_ar_bnp", "frequencies": [0.25, 0.1],
      "hyper": {"a_sigma": 2, "s0_scale": 0.5}, "bnp": {"alpha": 0.5, "n_aux": 10},
      "mcmc": {"iters": 100, "burnin": 40, "thin": 3}, "seed": 9})");
  EXPECT_EQ(c.variant, Variant::car_ar_bnp);
  EXPECT_EQ(c.harmonic.frequencies(), (std::vector<double>{0.25, 0.1}));
  EXPECT_EQ(c.hyper.a_sigma, 2.0);
  EXPECT_EQ(c.hyper.b_sigma, 0.01);
  EXPECT_EQ(c.bnp.n_aux, 10u);
  EXPECT_EQ(c.mcmc.n_draws(), 20u);
  EXPECT_EQ(c.mcmc.seed, 9u);
  const auto again = parse_model_config(model_config_json(c));
  EXPECT_EQ(model_config_json(again), model_config_json(c));

  const ModelConfig defaults;
  EXPECT_EQ(defaults.mcmc.n_draws(), 100u);
  EXPECT_EQ(defaults.hyper.beta0_var, 100.0);
  EXPECT_THROW((void)parse_model_config(R"({"variant": "car"})"), std::invalid_argument);
  EXPECT_THROW((void)parse_model_config(R"({"mcmc": {"iters": 10, "burnin": 10}})"), std::invalid_argument);
  EXPECT_THROW((void)parse_model_config("{"), std::exception);
  EXPECT_EQ(parse_variant(variant_name(Variant::car_ar_rho_fixed)), Variant::car_ar_rho_fixed);
}

TEST(PipelineConfigJson, MinutesAndPaths) {
  const auto setup = parse_pipeline_config(R"({"data": "trace.csv", "grid": "grid.json", "train_length": 200,
      "windows": 3, "horizons": [1, 3], "variants": ["baseline", "car_ar"],
      "properties": {"c": 250, "h_p1_minutes": 60, "h_p4_minutes": 40, "d_p4": 2},
      "model": {"frequencies": [0.0416666666666667], "mcmc": {"iters": 50, "burnin": 10, "thin": 2}}})",
                                           "/base", 20.0);
  EXPECT_EQ(setup.data, fs::path("/base/trace.csv"));
  EXPECT_EQ(setup.config.train_length, 200u);
  EXPECT_EQ(setup.config.n_windows, 3u);
  EXPECT_EQ(setup.config.properties.c, 250.0);
  EXPECT_EQ(setup.config.properties.h_p1, 3u);
  EXPECT_EQ(setup.config.properties.h_p4, 2u);
  EXPECT_EQ(setup.config.max_horizon(), 3u);
  EXPECT_THROW((void)parse_pipeline_config(R"({"train_length": 200, "properties": {"h_p1_minutes": 25}})", "/", 10.0),
               std::invalid_argument);
  EXPECT_THROW((void)parse_pipeline_config(R"({"train_length": 200, "horizons": [0]})", "/", 10.0),
               std::invalid_argument);
}
