#pragma once

#include "strelcast/assess.hpp"
#include "strelcast/model_config.hpp"
#include "strelcast/parser.hpp"
#include "strelcast/properties.hpp"
#include "strelcast/spatial.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strelcast {

struct PipelineConfig {
  std::size_t train_length = 0;
  /// Slots between consecutive window starts.
  std::size_t shift = 1;
  std::size_t n_windows = 1;
  /// Absolute slot of the first training window.
  std::size_t start = 0;
  std::vector<std::size_t> horizons{1, 2, 3};

  strel::PropertyParams properties;
  /// Subset of P1..P4 to monitor; empty means P1..P3 plus P4 when a hospital label exists.
  std::vector<std::string> property_names;
  /// Additional user formulas (from a property script).
  std::vector<strel::NamedFormula> extra_properties;

  /// Shared model settings; `variant` is overridden per entry of `variants`.
  model::ModelConfig model;
  /// When > 0 and no frequencies are configured, use the top-n periodogram peaks of the
  /// location-averaged log series of the first training window.
  std::size_t top_frequencies = 0;
  std::vector<model::Variant> variants{model::Variant::baseline, model::Variant::car_ar};
  /// Variant the Bayes factors are computed against (default: baseline if run, else the first).
  std::optional<model::Variant> reference;

  std::uint64_t seed = 1;
  int workers = 1;
  /// Write a full draw archive per window and variant.
  bool keep_draws = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  [[nodiscard]] std::size_t max_horizon() const;
};

/// Pipeline JSON plus the data files it names (resolved relative to the config file).
struct PipelineSetup {
  PipelineConfig config;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> grid;
  std::optional<std::filesystem::path> out;
};

/**
 * Keys: data, grid, out, train_length, shift, windows, start, horizons, seed, workers,
 * keep_draws, variants, reference, top_frequencies, property_script,
 * properties {c, h_p1..h_p4, d_p2..d_p4, or the same with a _minutes suffix for h},
 * names, model {frequencies, rho0, hyper, bnp, mcmc}.
 */
PipelineSetup parse_pipeline_config(const std::string& json_text, const std::filesystem::path& base_dir,
                                    double step_minutes);
PipelineSetup load_pipeline_config(const std::filesystem::path& path, double step_minutes);

struct LpdsRow {
  std::size_t window = 0;
  model::Variant variant = model::Variant::baseline;
  std::size_t horizon = 0;
  double lpds = 0.0;
};

struct BayesFactorRow {
  std::size_t window = 0;
  model::Variant variant = model::Variant::car_ar;
  model::Variant reference = model::Variant::baseline;
  std::size_t horizon = 0;
  double lpds_difference = 0.0;
  double cumulative = 0.0;
};

struct WindowFailure {
  std::size_t window = 0;
  model::Variant variant = model::Variant::baseline;
  std::string message;
};

struct PipelineResult {
  std::vector<LpdsRow> lpds;
  std::vector<BayesFactorRow> bayes_factors;
  /// Assessment rows per variant, in variant order.
  std::vector<std::vector<assess::ReportRow>> reports;
  std::vector<std::vector<assess::FieldRow>> fields;
  std::vector<WindowFailure> failures;
  std::vector<double> frequencies;

  /// Mean over windows of a report statistic, e.g. ("car_ar", "P1", "accuracy", "mean").
  [[nodiscard]] double window_average(const PipelineConfig& config, model::Variant variant,
                                      const std::string& property, const std::string& measure,
                                      const std::string& statistic) const;
  /// Final cumulative log Bayes factor of `variant` at horizon h (NaN if absent).
  [[nodiscard]] double final_log_bayes_factor(model::Variant variant, std::size_t h) const;
};

/**
 * Fits every variant on every rolling window, draws predictive trajectories up to the
 * largest horizon or property depth, scores LPDS, monitors the properties on draws and on
 * the realised data, and aggregates. Window/variant tasks run concurrently on
 * `config.workers` threads; each uses its own seed derived from (seed, window, variant),
 * so results do not depend on scheduling. A failing task is recorded and skipped.
 * When `out` is set, writes lpds.csv, bayes_factors.csv (two or more variants),
 * <variant>/report.csv, <variant>/fields.csv, failures.csv and windows/<w>/<variant>/.
 */
PipelineResult run_pipeline(const PipelineConfig& config, const Trace& data, const GridSpec& spec,
                            const std::optional<std::filesystem::path>& out = std::nullopt);

}  // namespace strelcast
