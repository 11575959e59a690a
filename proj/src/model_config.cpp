#include "strelcast/model_config.hpp"

#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"

#include <json.hpp>

#include <stdexcept>

namespace strelcast::model {

using nlohmann::json;

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::car_ar_rho_fixed: return "car_ar_rho_fixed";
    case Variant::car_ar: return "car_ar";
    case Variant::car_ar_bnp: return "car_ar_bnp";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (auto v : {Variant::baseline, Variant::car_ar_rho_fixed, Variant::car_ar, Variant::car_ar_bnp}) {
    if (variant_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown model variant '" + name + "'");
}

Hyperparams Hyperparams::resolved(std::size_t dim) const {
  Hyperparams out = *this;
  const auto d = static_cast<Eigen::Index>(dim);
  if (out.m0.size() == 0) out.m0 = Eigen::VectorXd::Zero(d);
  if (out.S0.size() == 0) {
    if (!(s0_scale > 0.0)) throw std::invalid_argument("S0 scale must be positive");
    out.S0 = s0_scale * Eigen::MatrixXd::Identity(d, d);
  }
  if (out.m0.size() != d) throw std::invalid_argument("m0 has the wrong dimension");
  if (out.S0.rows() != d || out.S0.cols() != d) throw std::invalid_argument("S0 has the wrong dimension");
  if (!out.S0.isApprox(out.S0.transpose())) throw std::invalid_argument("S0 must be symmetric");
  if (d > 0 && out.S0.llt().info() != Eigen::Success) throw std::invalid_argument("S0 must be positive definite");
  for (double v : {a_sigma, b_sigma, a_tau, b_tau, beta0_var}) {
    if (!(v > 0.0)) throw std::invalid_argument("variance hyperparameters must be positive");
  }
  return out;
}

void ModelConfig::validate() const {
  if (mcmc.thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (mcmc.burnin >= mcmc.iters) throw std::invalid_argument("burnin must be smaller than iters");
  if (variant == Variant::car_ar_rho_fixed && !(rho0 >= 0.0 && rho0 < 1.0)) {
    throw std::invalid_argument("rho0 must lie in [0, 1)");
  }
  if (variant == Variant::car_ar_bnp) {
    if (!(bnp.alpha > 0.0)) throw std::invalid_argument("BNP concentration must be positive");
    if (bnp.n_aux < 1) throw std::invalid_argument("BNP needs at least one auxiliary component");
  }
  (void)hyper.resolved(harmonic.dim());
}

namespace {

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != m.cols()) throw std::invalid_argument("S0 rows differ in length");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model config is not valid JSON: ") + e.what());
  }
  ModelConfig config;
  try {
    if (j.contains("variant")) config.variant = parse_variant(j["variant"].get<std::string>());
    if (j.contains("rho0")) config.rho0 = j["rho0"].get<double>();
    if (j.contains("frequencies")) config.harmonic = HarmonicDesign(j["frequencies"].get<std::vector<double>>());
    if (j.contains("keep_w")) config.keep_w = j["keep_w"].get<bool>();
    if (j.contains("hyper")) {
      const auto& h = j["hyper"];
      auto& hp = config.hyper;
      if (h.contains("m0")) hp.m0 = vector_from(h["m0"]);
      if (h.contains("S0")) hp.S0 = matrix_from(h["S0"]);
      hp.s0_scale = h.value("s0_scale", hp.s0_scale);
      hp.a_sigma = h.value("a_sigma", hp.a_sigma);
      hp.b_sigma = h.value("b_sigma", hp.b_sigma);
      hp.a_tau = h.value("a_tau", hp.a_tau);
      hp.b_tau = h.value("b_tau", hp.b_tau);
      hp.beta0_var = h.value("beta0_var", hp.beta0_var);
    }
    if (j.contains("bnp")) {
      config.bnp.alpha = j["bnp"].value("alpha", config.bnp.alpha);
      config.bnp.n_aux = j["bnp"].value("n_aux", config.bnp.n_aux);
    }
    if (j.contains("mcmc")) {
      const auto& m = j["mcmc"];
      config.mcmc.iters = m.value("iters", config.mcmc.iters);
      config.mcmc.burnin = m.value("burnin", config.mcmc.burnin);
      config.mcmc.thin = m.value("thin", config.mcmc.thin);
      config.mcmc.seed = m.value("seed", config.mcmc.seed);
    }
    if (j.contains("seed")) config.mcmc.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad model config field: ") + e.what());
  }
  config.validate();
  return config;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  return parse_model_config(csv::read_file(path));
}

std::string model_config_json(const ModelConfig& config) {
  json j;
  j["variant"] = variant_name(config.variant);
  j["rho0"] = config.rho0;
  j["frequencies"] = config.harmonic.frequencies();
  j["keep_w"] = config.keep_w;
  const auto hp = config.hyper.resolved(config.harmonic.dim());
  j["hyper"]["m0"] = std::vector<double>(hp.m0.data(), hp.m0.data() + hp.m0.size());
  json rows = json::array();
  for (Eigen::Index r = 0; r < hp.S0.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(hp.S0.cols()));
    for (Eigen::Index c = 0; c < hp.S0.cols(); ++c) row[static_cast<std::size_t>(c)] = hp.S0(r, c);
    rows.push_back(row);
  }
  j["hyper"]["S0"] = rows;
  j["hyper"]["a_sigma"] = hp.a_sigma;
  j["hyper"]["b_sigma"] = hp.b_sigma;
  j["hyper"]["a_tau"] = hp.a_tau;
  j["hyper"]["b_tau"] = hp.b_tau;
  j["hyper"]["beta0_var"] = hp.beta0_var;
  j["bnp"]["alpha"] = config.bnp.alpha;
  j["bnp"]["n_aux"] = config.bnp.n_aux;
  j["mcmc"]["iters"] = config.mcmc.iters;
  j["mcmc"]["burnin"] = config.mcmc.burnin;
  j["mcmc"]["thin"] = config.mcmc.thin;
  j["mcmc"]["seed"] = config.mcmc.seed;
  return j.dump(2) + "\n";
}

}  // namespace strelcast::model
