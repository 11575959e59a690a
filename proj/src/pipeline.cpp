#include "strelcast/pipeline.hpp"

#include "strelcast/archive.hpp"
#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"
#include "strelcast/gibbs.hpp"
#include "strelcast/harmonic.hpp"
#include "strelcast/monitor.hpp"
#include "strelcast/predictive.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace strelcast {

namespace fs = std::filesystem;
using model::Variant;
using nlohmann::json;

void PipelineConfig::validate() const {
  if (horizons.empty()) throw std::invalid_argument("at least one forecast horizon is required");
  for (auto h : horizons) {
    if (h < 1) throw std::invalid_argument("forecast horizons must be at least one step");
  }
  if (shift < 1) throw std::invalid_argument("window shift must be at least one step");
  if (n_windows < 1) throw std::invalid_argument("at least one window is required");
  if (variants.empty()) throw std::invalid_argument("at least one model variant is required");
  for (std::size_t a = 0; a < variants.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (variants[a] == variants[b]) throw std::invalid_argument("variant listed twice: " + model::variant_name(variants[a]));
    }
  }
  if (reference && std::find(variants.begin(), variants.end(), *reference) == variants.end()) {
    throw std::invalid_argument("reference variant is not among the variants run");
  }
  const std::size_t dim = model.harmonic.dim() > 0 ? model.harmonic.dim() : 2 * top_frequencies;
  if (train_length <= dim + 2) {
    throw std::invalid_argument("training length " + std::to_string(train_length) + " must exceed 2K+2 = " +
                                std::to_string(dim + 2));
  }
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  properties.validate();
  for (const auto& name : property_names) {
    if (name != "P1" && name != "P2" && name != "P3" && name != "P4") {
      throw std::invalid_argument("unknown standard property '" + name + "'");
    }
  }
}

std::size_t PipelineConfig::max_horizon() const {
  return *std::max_element(horizons.begin(), horizons.end());
}

PipelineSetup parse_pipeline_config(const std::string& json_text, const fs::path& base_dir, double step_minutes) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("pipeline config is not valid JSON: ") + e.what());
  }
  PipelineSetup setup;
  auto& c = setup.config;
  const auto path_of = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key)) return std::nullopt;
    fs::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  try {
    setup.data = path_of("data");
    setup.grid = path_of("grid");
    setup.out = path_of("out");
    c.train_length = j.at("train_length").get<std::size_t>();
    c.shift = j.value("shift", c.shift);
    c.n_windows = j.value("windows", c.n_windows);
    c.start = j.value("start", c.start);
    if (j.contains("horizons")) c.horizons = j["horizons"].get<std::vector<std::size_t>>();
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.keep_draws = j.value("keep_draws", c.keep_draws);
    c.top_frequencies = j.value("top_frequencies", c.top_frequencies);
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j["variants"]) c.variants.push_back(model::parse_variant(v.get<std::string>()));
    }
    if (j.contains("reference")) c.reference = model::parse_variant(j["reference"].get<std::string>());
    if (j.contains("model")) c.model = model::parse_model_config(j["model"].dump());
    if (j.contains("properties")) {
      const auto& p = j["properties"];
      auto& pp = c.properties;
      pp.c = p.value("c", pp.c);
      const auto steps = [&](const std::string& key, std::size_t& field) {
        if (p.contains(key)) field = p[key].get<std::size_t>();
        if (p.contains(key + "_minutes")) field = strel::minutes_to_steps(p[key + "_minutes"].get<double>(), step_minutes);
      };
      steps("h_p1", pp.h_p1);
      steps("h_p2", pp.h_p2);
      steps("h_p3", pp.h_p3);
      steps("h_p4", pp.h_p4);
      if (p.contains("d_p2")) pp.d_p2 = p["d_p2"].get<std::size_t>();
      if (p.contains("d_p3")) pp.d_p3 = p["d_p3"].get<std::size_t>();
      if (p.contains("d_p4")) pp.d_p4 = p["d_p4"].get<std::size_t>();
      if (p.contains("names")) c.property_names = p["names"].get<std::vector<std::string>>();
    }
    if (const auto script = path_of("property_script")) {
      c.extra_properties = strel::parse_property_script(csv::read_file(*script));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad pipeline config field: ") + e.what());
  }
  c.validate();
  return setup;
}

PipelineSetup load_pipeline_config(const fs::path& path, double step_minutes) {
  return parse_pipeline_config(csv::read_file(path), path.parent_path(), step_minutes);
}

double PipelineResult::window_average(const PipelineConfig& config, Variant variant, const std::string& property,
                                      const std::string& measure, const std::string& statistic) const {
  const auto it = std::find(config.variants.begin(), config.variants.end(), variant);
  if (it == config.variants.end()) return std::numeric_limits<double>::quiet_NaN();
  const auto& rows = reports[static_cast<std::size_t>(it - config.variants.begin())];
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.property == property && r.measure == measure && r.statistic == statistic) {
      sum += r.value;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

double PipelineResult::final_log_bayes_factor(Variant variant, std::size_t h) const {
  double out = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : bayes_factors) {
    if (r.variant == variant && r.horizon == h) out = r.cumulative;
  }
  return out;
}

namespace {

struct TaskOutput {
  bool ok = false;
  std::string error;
  std::map<std::size_t, double> lpds;
  std::vector<assess::ReportRow> report;
  std::vector<assess::FieldRow> fields;
  model::FitResult fit;
};

std::uint64_t derive_seed(std::uint64_t seed, std::size_t window, Variant v, std::uint64_t purpose) {
  auto rng = make_rng(seed, {static_cast<std::uint64_t>(window), static_cast<std::uint64_t>(v), purpose});
  return rng();
}

struct Shared {
  const PipelineConfig& config;
  const Trace& data;
  const GridSpec& spec;
  const model::LaplacianBasis& basis;
  const std::vector<strel::NamedProperty>& properties;
  const std::vector<double>& frequencies;
  std::size_t monitor_horizon;
};

void add_summary(std::vector<assess::ReportRow>& rows, const std::string& wid, const std::string& prop,
                 const std::string& measure, const assess::Summary& s, const char* headline = "mean") {
  rows.push_back({wid, prop, measure, headline, s.mean});
  rows.push_back({wid, prop, measure, "sd", s.sd});
  rows.push_back({wid, prop, measure, "q10", s.q10});
  rows.push_back({wid, prop, measure, "q90", s.q90});
}

TaskOutput run_task(const Shared& sh, std::size_t window, Variant variant) {
  TaskOutput out;
  const auto& cfg = sh.config;
  const std::string wid = std::to_string(window);
  const std::size_t first = cfg.start + window * cfg.shift;
  const std::size_t anchor = first + cfg.train_length - 1;

  model::ModelConfig mc = cfg.model;
  mc.variant = variant;
  mc.harmonic = model::HarmonicDesign(sh.frequencies, cfg.model.harmonic.max_time());
  mc.mcmc.seed = derive_seed(cfg.seed, window, variant, 0);
  out.fit = model::gibbs_run(sh.data.slice(first, cfg.train_length), sh.spec.grid, mc, first);

  const Eigen::VectorXd last = sh.data.values().col(static_cast<Eigen::Index>(anchor));
  const auto traces = model::predictive_draws(out.fit, sh.monitor_horizon, last, sh.basis,
                                              derive_seed(cfg.seed, window, variant, 1));
  for (auto h : cfg.horizons) {
    out.lpds[h] = model::lpds(out.fit, h, sh.data.values().col(static_cast<Eigen::Index>(anchor + h)), sh.basis);
  }

  const Trace observed = sh.data.slice(anchor, sh.monitor_horizon + 1);
  for (const auto& prop : sh.properties) {
    using strel::MonitorMode;
    const auto sat = strel::monitor_ensemble(prop.formula, traces, sh.spec.grid, sh.spec.labels, MonitorMode::boolean);
    const auto rob = strel::monitor_ensemble(prop.formula, traces, sh.spec.grid, sh.spec.labels, MonitorMode::robustness);
    const auto obs_sat = strel::boolean_monitor(prop.formula, observed, sh.spec.grid, sh.spec.labels);
    const auto obs_rob = strel::quantitative_monitor(prop.formula, observed, sh.spec.grid, sh.spec.labels);

    const auto prob = assess::satisfaction_probability(sat);
    const auto er = assess::expected_robustness(rob);
    for (Eigen::Index i = 0; i < prob.size(); ++i) {
      out.fields.push_back({wid, prop.name, static_cast<std::size_t>(i), prob[i], er[i]});
    }
    add_summary(out.report, wid, prop.name, "accuracy", assess::satisfaction_accuracy(sat, obs_sat));
    add_summary(out.report, wid, prop.name, "f1", assess::satisfaction_f1(sat, obs_sat));
    auto rmse = assess::summarize(assess::rmse_per_draw(rob, obs_rob));
    rmse.mean = assess::robustness_rmse(rob, obs_rob);
    add_summary(out.report, wid, prop.name, "rmse", rmse, "value");
    out.report.push_back({wid, prop.name, "observed_satisfaction", "share", obs_sat.values.mean()});
    out.report.push_back({wid, prop.name, "satisfaction_prob", "mean", prob.mean()});
  }
  out.ok = true;
  return out;
}

std::vector<strel::NamedProperty> select_properties(const PipelineConfig& config, const GridSpec& spec) {
  auto standard = strel::standard_properties(config.properties);
  std::vector<std::string> names = config.property_names;
  if (names.empty()) {
    names = {"P1", "P2", "P3"};
    if (spec.labels.has_label(strel::kHospitalLabel)) names.push_back("P4");
  }
  std::vector<strel::NamedProperty> out;
  for (const auto& name : names) {
    for (const auto& p : standard) {
      if (p.name == name) out.push_back(p);
    }
  }
  for (const auto& extra : config.extra_properties) out.push_back({extra.name, extra.formula});
  for (const auto& p : out) {
    for (const auto& label : strel::labels_used(p.formula)) {
      if (!spec.labels.has_label(label)) throw std::invalid_argument("property " + p.name + " needs label '" + label + "'");
    }
  }
  return out;
}

std::string params_csv(const model::FitResult& fit) {
  std::ostringstream out;
  out << "draw,beta0,xi,rho,tau2,sigma2,n_clusters\n";
  for (std::size_t m = 0; m < fit.draws.size(); ++m) {
    const auto& d = fit.draws[m];
    out << m << ',' << csv::format(d.beta0) << ',' << csv::format(d.xi) << ',' << csv::format(d.rho) << ','
        << csv::format(d.tau2) << ',' << csv::format(d.sigma2) << ',' << d.n_clusters() << '\n';
  }
  return out.str();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const Trace& data, const GridSpec& spec,
                            const std::optional<fs::path>& out_dir) {
  config.validate();
  if (data.n_locations() != spec.grid.size()) {
    throw std::invalid_argument("data has " + std::to_string(data.n_locations()) + " locations, grid has " +
                                std::to_string(spec.grid.size()));
  }
  for (Eigen::Index t = 0; t < data.values().cols(); ++t) {
    for (Eigen::Index i = 0; i < data.values().rows(); ++i) {
      if (!(data.values()(i, t) > 0.0)) {
        throw DataError("nonpositive value at location " + std::to_string(i) + ", time " + std::to_string(t));
      }
    }
  }
  const auto properties = select_properties(config, spec);
  std::size_t monitor_horizon = config.max_horizon();
  for (const auto& p : properties) monitor_horizon = std::max(monitor_horizon, strel::temporal_depth(p.formula));
  const std::size_t needed = config.start + (config.n_windows - 1) * config.shift + config.train_length + monitor_horizon;
  if (data.n_times() < needed) {
    throw DataError("data has " + std::to_string(data.n_times()) + " slots; the windows need " + std::to_string(needed));
  }

  PipelineResult result;
  result.frequencies = config.model.harmonic.frequencies();
  if (result.frequencies.empty() && config.top_frequencies > 0) {
    const Eigen::MatrixXd logs = data.slice(config.start, config.train_length).values().array().log();
    result.frequencies = model::top_frequencies(model::periodogram(logs.colwise().mean().transpose()), config.top_frequencies);
    std::sort(result.frequencies.begin(), result.frequencies.end());
  }

  const model::LaplacianBasis basis(spec.grid);
  const Shared shared{config, data, spec, basis, properties, result.frequencies, monitor_horizon};
  const std::size_t V = config.variants.size();
  const std::size_t n_tasks = config.n_windows * V;
  std::vector<TaskOutput> tasks(n_tasks);

#pragma omp parallel for schedule(dynamic) num_threads(config.workers)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_tasks); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const std::size_t window = idx / V;
    const Variant variant = config.variants[idx % V];
    try {
      tasks[idx] = run_task(shared, window, variant);
    } catch (const std::exception& e) {
      tasks[idx].ok = false;
      tasks[idx].error = e.what();
    }
  }

  result.reports.resize(V);
  result.fields.resize(V);
  for (std::size_t idx = 0; idx < n_tasks; ++idx) {
    const std::size_t window = idx / V;
    const std::size_t v = idx % V;
    auto& t = tasks[idx];
    if (!t.ok) {
      result.failures.push_back({window, config.variants[v], t.error});
      continue;
    }
    for (const auto& [h, value] : t.lpds) result.lpds.push_back({window, config.variants[v], h, value});
    result.reports[v].insert(result.reports[v].end(), t.report.begin(), t.report.end());
    result.fields[v].insert(result.fields[v].end(), t.fields.begin(), t.fields.end());
  }

  Variant reference = config.variants.front();
  if (config.reference) {
    reference = *config.reference;
  } else if (std::find(config.variants.begin(), config.variants.end(), Variant::baseline) != config.variants.end()) {
    reference = Variant::baseline;
  }
  const std::size_t ref_index = static_cast<std::size_t>(
      std::find(config.variants.begin(), config.variants.end(), reference) - config.variants.begin());
  if (V > 1) {
    for (std::size_t v = 0; v < V; ++v) {
      if (v == ref_index) continue;
      for (auto h : config.horizons) {
        double cumulative = 0.0;
        for (std::size_t w = 0; w < config.n_windows; ++w) {
          const auto& a = tasks[w * V + v];
          const auto& b = tasks[w * V + ref_index];
          if (!a.ok || !b.ok) continue;
          const double diff = a.lpds.at(h) - b.lpds.at(h);
          cumulative += diff;
          result.bayes_factors.push_back({w, config.variants[v], reference, h, diff, cumulative});
        }
      }
    }
  }

  if (out_dir) {
    const auto& dir = *out_dir;
    std::ostringstream lp;
    lp << "window_id,variant,horizon,lpds\n";
    for (const auto& r : result.lpds) lp << r.window << ',' << model::variant_name(r.variant) << ',' << r.horizon << ',' << csv::format(r.lpds) << '\n';
    csv::write_file(dir / "lpds.csv", lp.str());
    if (V > 1) {
      std::ostringstream bf;
      bf << "window_id,variant,reference,horizon,lpds_difference,cumulative_log_bf\n";
      for (const auto& r : result.bayes_factors) {
        bf << r.window << ',' << model::variant_name(r.variant) << ',' << model::variant_name(r.reference) << ','
           << r.horizon << ',' << csv::format(r.lpds_difference) << ',' << csv::format(r.cumulative) << '\n';
      }
      csv::write_file(dir / "bayes_factors.csv", bf.str());
    }
    std::ostringstream fail;
    fail << "window_id,variant,message\n";
    for (const auto& f : result.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      fail << f.window << ',' << model::variant_name(f.variant) << ',' << msg << '\n';
    }
    csv::write_file(dir / "failures.csv", fail.str());
    for (std::size_t v = 0; v < V; ++v) {
      const auto name = model::variant_name(config.variants[v]);
      csv::write_file(dir / name / "report.csv", assess::report_csv(result.reports[v]));
      csv::write_file(dir / name / "fields.csv", assess::fields_csv(result.fields[v]));
    }
    for (std::size_t idx = 0; idx < n_tasks; ++idx) {
      if (!tasks[idx].ok) continue;
      const auto wdir = dir / "windows" / std::to_string(idx / V) / model::variant_name(config.variants[idx % V]);
      if (config.keep_draws) {
        model::save_fit(tasks[idx].fit, wdir);
      } else {
        csv::write_file(wdir / "params.csv", params_csv(tasks[idx].fit));
      }
    }
  }
  return result;
}

}  // namespace strelcast
