#include "strelcast/archive.hpp"
#include "strelcast/assess.hpp"
#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"
#include "strelcast/gibbs.hpp"
#include "strelcast/harmonic.hpp"
#include "strelcast/ingest.hpp"
#include "strelcast/monitor.hpp"
#include "strelcast/parser.hpp"
#include "strelcast/pipeline.hpp"
#include "strelcast/predictive.hpp"
#include "strelcast/properties.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace strelcast;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  double step_minutes = 10.0;
  std::string out;
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    csv::write_file(out, text);
  }
}

// Trace files in a directory, ordered numerically by stem when possible.
std::vector<fs::path> trace_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  const auto key = [](const fs::path& p) {
    const auto stem = p.stem().string();
    const bool numeric = !stem.empty() && std::all_of(stem.begin(), stem.end(), ::isdigit);
    return std::make_pair(numeric ? std::stoll(stem) : std::numeric_limits<long long>::max(), stem);
  };
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) { return key(a) < key(b); });
  return files;
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string raw;
  std::string grid_spec;
  IngestOptions opts;
};

int run_ingest(const IngestArgs& a, const Globals& g) {
  if (g.out.empty()) throw CLI::ValidationError("--out", "ingest needs an output directory");
  std::optional<fs::path> spec;
  if (!a.grid_spec.empty()) spec = a.grid_spec;
  const auto result = ingest_file(a.raw, a.opts, spec);
  const fs::path out = g.out;
  save_trace_csv(result.trace, out / "trace.csv");
  save_grid_json(result.spec, out / "grid.json");
  std::ostringstream slots;
  slots << "time_index,slot\n";
  for (std::size_t t = 0; t < result.slots.size(); ++t) slots << t << ',' << result.slots[t] << '\n';
  csv::write_file(out / "slots.csv", slots.str());
  std::cout << "ingested " << result.trace.n_locations() << " locations x " << result.trace.n_times() << " slots\n";
  return kOk;
}

// --- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  std::string data;
  std::optional<std::size_t> location;
  std::size_t first = 0;
  std::optional<std::size_t> length;
  std::size_t top = 0;
  bool raw_scale = false;
};

int run_spectrum(const SpectrumArgs& a, const Globals& g) {
  const auto trace = load_trace_csv(a.data);
  const std::size_t len = a.length.value_or(trace.n_times() - std::min(a.first, trace.n_times()));
  Eigen::MatrixXd v = trace.slice(a.first, len).values();
  if (!a.raw_scale) {
    if ((v.array() <= 0.0).any()) throw DataError("log spectrum needs strictly positive data (use --raw-scale)");
    v = v.array().log().matrix();
  }
  Eigen::VectorXd series;
  if (a.location) {
    if (*a.location >= trace.n_locations()) throw CLI::ValidationError("--location", "location id out of range");
    series = v.row(static_cast<Eigen::Index>(*a.location)).transpose();
  } else {
    series = v.colwise().mean().transpose();
  }
  const auto spectrum = model::periodogram(series);
  std::ostringstream out;
  out << "frequency,power\n";
  for (const auto& s : spectrum) out << csv::format(s.frequency) << ',' << csv::format(s.power) << '\n';
  emit(g.out, out.str());
  if (a.top > 0) {
    std::cerr << "top frequencies:";
    for (double f : model::top_frequencies(spectrum, a.top)) std::cerr << ' ' << csv::format(f);
    std::cerr << '\n';
  }
  return kOk;
}

// --- fit --------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string grid;
  std::string variant;
  std::size_t first = 0;
  std::optional<std::size_t> length;
  std::vector<double> frequencies;
  std::size_t top = 0;
  bool keep_w = false;
};

int run_fit(const FitArgs& a, const Globals& g) {
  if (g.out.empty()) throw CLI::ValidationError("--out", "fit needs an output directory");
  const auto spec = load_grid_json(a.grid);
  const auto trace = load_trace_csv(a.data, spec.grid.size());
  model::ModelConfig config = g.config.empty() ? model::ModelConfig{} : model::load_model_config(g.config);
  if (!a.variant.empty()) config.variant = model::parse_variant(a.variant);
  if (g.seed) config.mcmc.seed = *g.seed;
  if (a.keep_w) config.keep_w = true;
  if (a.first >= trace.n_times()) throw CLI::ValidationError("--first", "beyond the end of the data");
  const std::size_t len = a.length.value_or(trace.n_times() - a.first);
  const auto train = trace.slice(a.first, len);
  if (!a.frequencies.empty()) {
    config.harmonic = model::HarmonicDesign(a.frequencies);
  } else if (a.top > 0) {
    const Eigen::MatrixXd logs = train.values().array().log();
    auto freqs = model::top_frequencies(model::periodogram(logs.colwise().mean().transpose()), a.top);
    std::sort(freqs.begin(), freqs.end());
    config.harmonic = model::HarmonicDesign(freqs);
  }
  const auto fit = model::gibbs_run(train, spec.grid, config, a.first);
  model::save_fit(fit, g.out, config.keep_w);
  double xi = 0, rho = 0, tau2 = 0, sigma2 = 0;
  for (const auto& d : fit.draws) {
    xi += d.xi;
    rho += d.rho;
    tau2 += d.tau2;
    sigma2 += d.sigma2;
  }
  const double m = static_cast<double>(fit.draws.size());
  std::cout << model::variant_name(fit.variant) << ": " << fit.draws.size() << " draws; posterior means xi "
            << xi / m << ", rho " << rho / m << ", tau2 " << tau2 / m << ", sigma2 " << sigma2 / m << '\n';
  return kOk;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
  std::string draws;
  std::string data;
  std::string grid;
  std::size_t horizon = 1;
};

int run_predict(const PredictArgs& a, const Globals& g) {
  if (g.out.empty()) throw CLI::ValidationError("--out", "predict needs an output directory");
  const auto spec = load_grid_json(a.grid);
  const auto trace = load_trace_csv(a.data, spec.grid.size());
  const auto fit = model::load_fit(a.draws);
  const std::size_t anchor = fit.time_offset + fit.n_times - 1;
  if (anchor >= trace.n_times()) throw DataError("data does not contain the forecast origin (slot " + std::to_string(anchor) + ")");
  const model::LaplacianBasis basis(spec.grid);
  const Eigen::VectorXd last = trace.values().col(static_cast<Eigen::Index>(anchor));
  const auto traces = model::predictive_draws(fit, a.horizon, last, basis, g.seed.value_or(1));
  const fs::path out = g.out;
  for (std::size_t m = 0; m < traces.size(); ++m) save_trace_csv(traces[m], out / "traces" / (std::to_string(m) + ".csv"));
  std::ostringstream lp;
  lp << "horizon,lpds\n";
  bool any = false;
  for (std::size_t h = 1; h <= a.horizon && anchor + h < trace.n_times(); ++h) {
    lp << h << ',' << csv::format(model::lpds(fit, h, trace.values().col(static_cast<Eigen::Index>(anchor + h)), basis)) << '\n';
    any = true;
  }
  if (any) csv::write_file(out / "lpds.csv", lp.str());
  std::cout << "wrote " << traces.size() << " predictive traces of horizon " << a.horizon << '\n';
  return kOk;
}

// --- monitor ----------------------------------------------------------------

struct PropertyArgs {
  std::string formula;
  std::string property;
  std::string script;
  std::string name;
  std::optional<double> c;
  std::optional<std::size_t> h;
  std::optional<double> h_minutes;
  std::optional<std::size_t> d;
};

strel::Formula resolve_property(const PropertyArgs& a, const Globals& g, const StaticLabels& labels) {
  strel::ParseOptions opts;
  opts.known_labels = std::set<std::string>();
  for (const auto& n : labels.names()) opts.known_labels->insert(n);
  const int chosen = !a.formula.empty() + !a.property.empty() + !a.script.empty();
  if (chosen != 1) throw CLI::ValidationError("property", "give exactly one of --formula, --property, --script");
  if (!a.formula.empty()) return strel::parse(a.formula, opts);
  if (!a.script.empty()) {
    const auto named = strel::parse_property_script(csv::read_file(a.script), opts);
    if (named.empty()) throw DataError("property script defines no formulas");
    if (a.name.empty()) {
      if (named.size() > 1) throw CLI::ValidationError("--name", "script has several formulas; choose one");
      return named.front().formula;
    }
    for (const auto& n : named) {
      if (n.name == a.name) return n.formula;
    }
    throw CLI::ValidationError("--name", "no formula named '" + a.name + "' in the script");
  }
  strel::PropertyParams p;
  const double c = a.c.value_or(p.c);
  std::optional<std::size_t> h = a.h;
  if (a.h_minutes) h = strel::minutes_to_steps(*a.h_minutes, g.step_minutes);
  if (a.property == "P1") return strel::build_p1(c, h.value_or(p.h_p1));
  if (a.property == "P2") return strel::build_p2(c, h.value_or(p.h_p2), a.d.value_or(p.d_p2));
  if (a.property == "P3") return strel::build_p3(c, h.value_or(p.h_p3), a.d.value_or(p.d_p3));
  if (a.property == "P4") {
    const auto d = a.d.value_or(p.d_p4);
    if (h && *h != d) throw CLI::ValidationError("--h-steps", "P4 moves one cell per step, so the time bound must equal d");
    return strel::build_p4(c, d);
  }
  throw CLI::ValidationError("--property", "expected P1, P2, P3 or P4");
}

struct MonitorArgs {
  PropertyArgs prop;
  std::string grid;
  std::string trace;
  std::string traces;
  std::string mode = "boolean";
};

int run_monitor(const MonitorArgs& a, const Globals& g) {
  const auto spec = load_grid_json(a.grid);
  const auto formula = resolve_property(a.prop, g, spec.labels);
  const auto mode = a.mode == "boolean" ? strel::MonitorMode::boolean : strel::MonitorMode::robustness;
  if (a.trace.empty() == a.traces.empty()) throw CLI::ValidationError("trace", "give exactly one of --trace, --traces");
  if (!a.trace.empty()) {
    const auto trace = load_trace_csv(a.trace, spec.grid.size());
    const auto field = mode == strel::MonitorMode::boolean ? strel::boolean_monitor(formula, trace, spec.grid, spec.labels)
                                                           : strel::quantitative_monitor(formula, trace, spec.grid, spec.labels);
    emit(g.out, assess::verification_csv(field));
    return kOk;
  }
  if (g.out.empty()) throw CLI::ValidationError("--out", "ensemble monitoring needs an output directory");
  const auto files = trace_files(a.traces);
  std::vector<Trace> traces;
  for (const auto& f : files) traces.push_back(load_trace_csv(f, spec.grid.size()));
  const auto fields = strel::monitor_ensemble(formula, traces, spec.grid, spec.labels, mode);
  for (std::size_t m = 0; m < fields.size(); ++m) csv::write_file(fs::path(g.out) / files[m].filename(), assess::verification_csv(fields[m]));
  std::cout << "monitored " << fields.size() << " traces\n";
  return kOk;
}

// --- assess -----------------------------------------------------------------

struct AssessArgs {
  std::string pred;
  std::string obs;
  std::string window_id = "0";
  std::string property = "property";
  std::string assignments;
};

int run_assess(const AssessArgs& a, const Globals& g) {
  if (g.out.empty()) throw CLI::ValidationError("--out", "assess needs an output directory");
  const fs::path out = g.out;
  if (!a.pred.empty()) {
    if (a.obs.empty()) throw CLI::ValidationError("--obs", "observed verification CSV required with --pred");
    std::vector<strel::VerificationField> pred;
    for (const auto& f : trace_files(a.pred)) pred.push_back(assess::parse_verification_csv(csv::read_file(f)));
    if (pred.empty()) throw DataError("no verification CSVs in " + a.pred);
    const auto obs = assess::parse_verification_csv(csv::read_file(a.obs));
    for (const auto& f : pred) {
      if (f.mode != obs.mode) throw DataError("predicted and observed fields use different modes");
    }
    std::vector<assess::ReportRow> report;
    std::vector<assess::FieldRow> fields;
    const auto add = [&](const std::string& measure, const assess::Summary& s, const char* head = "mean") {
      report.push_back({a.window_id, a.property, measure, head, s.mean});
      report.push_back({a.window_id, a.property, measure, "sd", s.sd});
      report.push_back({a.window_id, a.property, measure, "q10", s.q10});
      report.push_back({a.window_id, a.property, measure, "q90", s.q90});
    };
    std::vector<strel::VerificationField> sat;
    strel::VerificationField obs_sat = obs;
    Eigen::VectorXd er = Eigen::VectorXd::Constant(obs.values.size(), std::numeric_limits<double>::quiet_NaN());
    if (obs.mode == strel::MonitorMode::robustness) {
      for (const auto& f : pred) sat.push_back(strel::satisfaction_from_robustness(f));
      obs_sat = strel::satisfaction_from_robustness(obs);
      er = assess::expected_robustness(pred);
      auto rmse = assess::summarize(assess::rmse_per_draw(pred, obs));
      rmse.mean = assess::robustness_rmse(pred, obs);
      add("rmse", rmse, "value");
    } else {
      sat = pred;
    }
    add("accuracy", assess::satisfaction_accuracy(sat, obs_sat));
    add("f1", assess::satisfaction_f1(sat, obs_sat));
    const auto prob = assess::satisfaction_probability(sat);
    for (Eigen::Index i = 0; i < prob.size(); ++i) {
      fields.push_back({a.window_id, a.property, static_cast<std::size_t>(i), prob[i], er[i]});
    }
    csv::write_file(out / "report.csv", assess::report_csv(report));
    csv::write_file(out / "fields.csv", assess::fields_csv(fields));
  }
  if (!a.assignments.empty()) {
    std::map<std::size_t, assess::Partition> by_draw;
    const auto text = csv::read_file(a.assignments);
    const auto rows = csv::lines(text);
    if (rows.empty() || csv::trim(rows[0]) != "draw,location_id,cluster") {
      throw DataError("assignments CSV header must be 'draw,location_id,cluster'");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto f = csv::split(rows[r]);
      if (f.size() != 3) throw DataError("assignments CSV line " + std::to_string(r + 1) + " needs 3 fields");
      by_draw[static_cast<std::size_t>(csv::to_int(f[0], "draw"))].push_back(static_cast<std::size_t>(csv::to_int(f[2], "cluster")));
    }
    std::vector<assess::Partition> draws;
    for (auto& [m, p] : by_draw) draws.push_back(std::move(p));
    if (draws.empty()) throw DataError("no partitions in " + a.assignments);
    const auto best = assess::binder_partition(draws);
    std::ostringstream b;
    b << "location_id,cluster\n";
    for (std::size_t i = 0; i < best.partition.size(); ++i) b << i << ',' << best.partition[i] << '\n';
    csv::write_file(out / "binder.csv", b.str());
    std::cout << "Binder estimate: draw " << best.draw_index << ", loss " << best.loss << '\n';
  }
  if (a.pred.empty() && a.assignments.empty()) throw CLI::ValidationError("assess", "nothing to assess; give --pred or --assignments");
  return kOk;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string lpds;
  std::string variant = "car_ar";
  std::string reference = "baseline";
  std::size_t horizon = 1;
};

int run_compare(const CompareArgs& a, const Globals& g) {
  const auto text = csv::read_file(a.lpds);
  const auto rows = csv::lines(text);
  if (rows.empty() || csv::trim(rows[0]) != "window_id,variant,horizon,lpds") {
    throw DataError("LPDS CSV header must be 'window_id,variant,horizon,lpds'");
  }
  std::map<std::string, std::map<std::int64_t, double>> series;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto f = csv::split(rows[r]);
    if (f.size() != 4) throw DataError("LPDS CSV line " + std::to_string(r + 1) + " needs 4 fields");
    if (csv::to_int(f[2], "horizon") != static_cast<std::int64_t>(a.horizon)) continue;
    series[std::string(csv::trim(f[1]))][csv::to_int(f[0], "window_id")] = csv::to_double(f[3], "lpds");
  }
  const auto& sa = series[a.variant];
  const auto& sb = series[a.reference];
  std::vector<std::int64_t> windows;
  std::vector<double> la, lb;
  for (const auto& [w, v] : sa) {
    const auto it = sb.find(w);
    if (it == sb.end()) continue;
    windows.push_back(w);
    la.push_back(v);
    lb.push_back(it->second);
  }
  if (windows.empty()) throw DataError("no windows with LPDS for both '" + a.variant + "' and '" + a.reference + "'");
  const auto bf = model::cumulative_log_bayes_factor(la, lb);
  std::ostringstream out;
  out << "window_id,lpds_difference,cumulative_log_bf\n";
  for (std::size_t k = 0; k < windows.size(); ++k) out << windows[k] << ',' << csv::format(la[k] - lb[k]) << ',' << csv::format(bf[k]) << '\n';
  emit(g.out, out.str());
  return kOk;
}

// --- pipeline ---------------------------------------------------------------

struct PipelineArgs {
  std::string data;
  std::string grid;
};

int run_pipeline_cmd(const PipelineArgs& a, const Globals& g) {
  if (g.config.empty()) throw CLI::ValidationError("--config", "pipeline needs a config file");
  auto setup = load_pipeline_config(g.config, g.step_minutes);
  if (g.seed) setup.config.seed = *g.seed;
  setup.config.workers = g.workers;
  if (!a.data.empty()) setup.data = a.data;
  if (!a.grid.empty()) setup.grid = a.grid;
  if (!g.out.empty()) setup.out = g.out;
  if (!setup.data || !setup.grid) throw CLI::ValidationError("--data", "data and grid must be given in the config or on the command line");
  if (!setup.out) throw CLI::ValidationError("--out", "pipeline needs an output directory");
  const auto spec = load_grid_json(*setup.grid);
  const auto trace = load_trace_csv(*setup.data, spec.grid.size());
  const auto result = run_pipeline(setup.config, trace, spec, setup.out);
  for (const auto& f : result.failures) {
    std::cerr << "window " << f.window << " / " << model::variant_name(f.variant) << " failed: " << f.message << '\n';
  }
  for (const auto v : setup.config.variants) {
    const double bf = result.final_log_bayes_factor(v, setup.config.horizons.front());
    if (!std::isnan(bf)) std::cout << model::variant_name(v) << ": cumulative log BF " << bf << '\n';
  }
  const bool all_failed = result.failures.size() == setup.config.n_windows * setup.config.variants.size();
  return all_failed ? kNumerical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian spatio-temporal forecasting with STREL property monitoring"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--step-minutes", g.step_minutes, "length of one time step in minutes")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file or directory");

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "aggregate raw activity records into a trace");
  ingest->add_option("--raw", ia.raw, "raw CSV: cell_id,time_slot,activity...")->required()->check(CLI::ExistingFile);
  ingest->add_option("--grid-spec", ia.grid_spec, "grid JSON for the selected subgrid (labels)")->check(CLI::ExistingFile);
  ingest->add_option("--source-cols", ia.opts.source_cols, "columns of the source grid")->required();
  ingest->add_option("--id-base", ia.opts.id_base, "id of the source grid's first cell");
  ingest->add_option("--row0", ia.opts.row0, "first selected row");
  ingest->add_option("--col0", ia.opts.col0, "first selected column");
  ingest->add_option("--rows", ia.opts.rows, "selected rows")->required();
  ingest->add_option("--cols", ia.opts.cols, "selected columns")->required();

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "periodogram for harmonic frequency selection");
  spectrum->add_option("--data", sa.data, "trace CSV")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--location", sa.location, "single location (default: mean over locations)");
  spectrum->add_option("--first", sa.first, "first time index");
  spectrum->add_option("--length", sa.length, "number of slots");
  spectrum->add_option("--top", sa.top, "report the n largest peaks");
  spectrum->add_flag("--raw-scale", sa.raw_scale, "skip the log transform");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and write a draw archive");
  fit->add_option("--data", fa.data, "trace CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--grid", fa.grid, "grid JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--variant", fa.variant, "baseline | car_ar_rho_fixed | car_ar | car_ar_bnp");
  fit->add_option("--first", fa.first, "first training slot");
  fit->add_option("--length", fa.length, "training slots");
  fit->add_option("--frequencies", fa.frequencies, "harmonic frequencies (cycles per slot)");
  fit->add_option("--top-frequencies", fa.top, "use the n largest periodogram peaks");
  fit->add_flag("--keep-w", fa.keep_w, "archive the full latent field of each draw");

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "draw predictive trajectories from a draw archive");
  predict->add_option("--draws", pa.draws, "draw archive directory")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--data", pa.data, "trace CSV containing the forecast origin")->required()->check(CLI::ExistingFile);
  predict->add_option("--grid", pa.grid, "grid JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("--horizon", pa.horizon, "steps ahead")->check(CLI::PositiveNumber);

  MonitorArgs ma;
  auto* monitor = app.add_subcommand("monitor", "evaluate a STREL property on traces");
  const auto add_property_flags = [](CLI::App* cmd, PropertyArgs& p) {
    cmd->add_option("--formula", p.formula, "formula text");
    cmd->add_option("--property", p.property, "P1 | P2 | P3 | P4");
    cmd->add_option("--script", p.script, "property script (name := formula per line)")->check(CLI::ExistingFile);
    cmd->add_option("--name", p.name, "formula to use from the script");
    cmd->add_option("--c", p.c, "crowdedness threshold");
    cmd->add_option("--h-steps", p.h, "time bound in steps");
    cmd->add_option("--h-minutes", p.h_minutes, "time bound in minutes");
    cmd->add_option("--d", p.d, "distance bound in hops");
  };
  add_property_flags(monitor, ma.prop);
  monitor->add_option("--grid", ma.grid, "grid JSON")->required()->check(CLI::ExistingFile);
  monitor->add_option("--trace", ma.trace, "single trace CSV")->check(CLI::ExistingFile);
  monitor->add_option("--traces", ma.traces, "directory of trace CSVs")->check(CLI::ExistingDirectory);
  monitor->add_option("--mode", ma.mode, "boolean | robustness")->check(CLI::IsMember({"boolean", "robustness"}));

  AssessArgs aa;
  auto* assess_cmd = app.add_subcommand("assess", "aggregate verification fields and cluster draws");
  assess_cmd->add_option("--pred", aa.pred, "directory of predicted verification CSVs")->check(CLI::ExistingDirectory);
  assess_cmd->add_option("--obs", aa.obs, "observed verification CSV")->check(CLI::ExistingFile);
  assess_cmd->add_option("--window-id", aa.window_id, "window id for the report");
  assess_cmd->add_option("--property-name", aa.property, "property name for the report");
  assess_cmd->add_option("--assignments", aa.assignments, "assignments.csv from a draw archive")->check(CLI::ExistingFile);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "cumulative log Bayes factors from an LPDS table");
  compare->add_option("--lpds", ca.lpds, "lpds.csv written by pipeline")->required()->check(CLI::ExistingFile);
  compare->add_option("--variant", ca.variant, "model in the numerator");
  compare->add_option("--reference", ca.reference, "model in the denominator");
  compare->add_option("--horizon", ca.horizon, "forecast horizon")->check(CLI::PositiveNumber);

  PipelineArgs pla;
  auto* pipeline = app.add_subcommand("pipeline", "rolling-window model comparison");
  pipeline->add_option("--data", pla.data, "trace CSV (overrides the config)")->check(CLI::ExistingFile);
  pipeline->add_option("--grid", pla.grid, "grid JSON (overrides the config)")->check(CLI::ExistingFile);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  omp_set_num_threads(g.workers);
  try {
    if (*ingest) return run_ingest(ia, g);
    if (*spectrum) return run_spectrum(sa, g);
    if (*fit) return run_fit(fa, g);
    if (*predict) return run_predict(pa, g);
    if (*monitor) return run_monitor(ma, g);
    if (*assess_cmd) return run_assess(aa, g);
    if (*compare) return run_compare(ca, g);
    if (*pipeline) return run_pipeline_cmd(pla, g);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const strel::ParseError& e) {
    std::cerr << "formula error: " << e.what() << '\n';
    return kUsage;
  } catch (const HorizonError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
