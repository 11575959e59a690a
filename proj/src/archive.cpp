#include "strelcast/archive.hpp"

#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"

#include <json.hpp>

#include <sstream>
#include <string>

namespace strelcast::model {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void expect_header(std::string_view line, std::string_view header, const fs::path& file) {
  if (csv::trim(line) != header) {
    throw DataError(file.string() + ": expected header '" + std::string(header) + "'");
  }
}

std::size_t to_index(std::string_view field, std::string_view what) {
  const auto v = csv::to_int(field, what);
  if (v < 0) throw DataError(std::string(what) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

}  // namespace

void save_fit(const FitResult& fit, const fs::path& dir, bool write_w) {
  fs::create_directories(dir / "betas");
  json meta;
  meta["variant"] = variant_name(fit.variant);
  meta["frequencies"] = fit.harmonic.frequencies();
  meta["time_offset"] = fit.time_offset;
  meta["n_times"] = fit.n_times;
  meta["n_draws"] = fit.draws.size();
  meta["accept_rho"] = fit.accept_rho;
  meta["accept_xi"] = fit.accept_xi;
  if (fit.harmonic.max_time()) meta["max_time"] = *fit.harmonic.max_time();
  csv::write_file(dir / "model.json", meta.dump(2) + "\n");

  std::ostringstream params, assign, wlast;
  params << "draw,beta0,xi,rho,tau2,sigma2,n_clusters\n";
  assign << "draw,location_id,cluster\n";
  wlast << "draw,location_id,value\n";
  for (std::size_t m = 0; m < fit.draws.size(); ++m) {
    const auto& d = fit.draws[m];
    params << m << ',' << csv::format(d.beta0) << ',' << csv::format(d.xi) << ',' << csv::format(d.rho) << ','
           << csv::format(d.tau2) << ',' << csv::format(d.sigma2) << ',' << d.n_clusters() << '\n';
    for (std::size_t i = 0; i < d.assignments.size(); ++i) assign << m << ',' << i << ',' << d.assignments[i] << '\n';
    for (Eigen::Index i = 0; i < d.w_last.size(); ++i) wlast << m << ',' << i << ',' << csv::format(d.w_last[i]) << '\n';

    std::ostringstream betas;
    betas << "cluster";
    for (std::size_t k = 0; k < fit.harmonic.dim(); ++k) betas << ",b" << k;
    betas << '\n';
    for (std::size_t j = 0; j < d.betas.size(); ++j) {
      betas << j;
      for (Eigen::Index k = 0; k < d.betas[j].size(); ++k) betas << ',' << csv::format(d.betas[j][k]);
      betas << '\n';
    }
    csv::write_file(dir / "betas" / (std::to_string(m) + ".csv"), betas.str());
    if (write_w && d.w.size() > 0) save_trace_csv(Trace(d.w), dir / "w" / (std::to_string(m) + ".csv"));
  }
  csv::write_file(dir / "params.csv", params.str());
  csv::write_file(dir / "assignments.csv", assign.str());
  csv::write_file(dir / "w_last.csv", wlast.str());
}

FitResult load_fit(const fs::path& dir) {
  FitResult fit;
  json meta;
  try {
    meta = json::parse(csv::read_file(dir / "model.json"));
    fit.variant = parse_variant(meta.at("variant").get<std::string>());
    std::optional<std::size_t> max_time;
    if (meta.contains("max_time")) max_time = meta["max_time"].get<std::size_t>();
    fit.harmonic = HarmonicDesign(meta.at("frequencies").get<std::vector<double>>(), max_time);
    fit.time_offset = meta.at("time_offset").get<std::size_t>();
    fit.n_times = meta.at("n_times").get<std::size_t>();
    fit.accept_rho = meta.value("accept_rho", 0.0);
    fit.accept_xi = meta.value("accept_xi", 0.0);
  } catch (const json::exception& e) {
    throw DataError((dir / "model.json").string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError((dir / "model.json").string() + ": " + e.what());
  }
  const std::size_t dim = fit.harmonic.dim();

  const auto params_path = dir / "params.csv";
  const auto params_text = csv::read_file(params_path);
  const auto rows = csv::lines(params_text);
  if (rows.empty()) throw DataError(params_path.string() + " is empty");
  expect_header(rows[0], "draw,beta0,xi,rho,tau2,sigma2,n_clusters", params_path);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto f = csv::split(rows[r]);
    if (f.size() != 7 || to_index(f[0], "draw") != r - 1) throw DataError(params_path.string() + ": malformed row " + std::to_string(r + 1));
    PosteriorDraw d;
    d.beta0 = csv::to_double(f[1], "beta0");
    d.xi = csv::to_double(f[2], "xi");
    d.rho = csv::to_double(f[3], "rho");
    d.tau2 = csv::to_double(f[4], "tau2");
    d.sigma2 = csv::to_double(f[5], "sigma2");
    const auto J = to_index(f[6], "n_clusters");

    const auto betas_path = dir / "betas" / (std::to_string(r - 1) + ".csv");
    const auto betas_text = csv::read_file(betas_path);
    const auto brows = csv::lines(betas_text);
    if (brows.size() != J + 1) throw DataError(betas_path.string() + ": expected " + std::to_string(J) + " clusters");
    for (std::size_t j = 0; j < J; ++j) {
      const auto bf = csv::split(brows[j + 1]);
      if (bf.size() != dim + 1 || to_index(bf[0], "cluster") != j) throw DataError(betas_path.string() + ": malformed row");
      Eigen::VectorXd b(static_cast<Eigen::Index>(dim));
      for (std::size_t k = 0; k < dim; ++k) b[static_cast<Eigen::Index>(k)] = csv::to_double(bf[k + 1], "coefficient");
      d.betas.push_back(std::move(b));
    }
    const auto w_path = dir / "w" / (std::to_string(r - 1) + ".csv");
    if (fs::exists(w_path)) d.w = load_trace_csv(w_path).values();
    fit.draws.push_back(std::move(d));
  }

  const auto load_long = [&](const fs::path& path, std::string_view header, auto&& apply) {
    const auto text = csv::read_file(path);
    const auto lines = csv::lines(text);
    if (lines.empty()) throw DataError(path.string() + " is empty");
    expect_header(lines[0], header, path);
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto f = csv::split(lines[r]);
      if (f.size() != 3) throw DataError(path.string() + ": malformed row " + std::to_string(r + 1));
      const auto m = to_index(f[0], "draw");
      if (m >= fit.draws.size()) throw DataError(path.string() + ": draw index out of range");
      apply(fit.draws[m], to_index(f[1], "location_id"), f[2]);
    }
  };
  load_long(dir / "assignments.csv", "draw,location_id,cluster", [&](PosteriorDraw& d, std::size_t i, std::string_view v) {
    if (d.assignments.size() != i) throw DataError("assignments.csv: locations out of order");
    const auto c = to_index(v, "cluster");
    if (c >= d.betas.size()) throw DataError("assignments.csv: cluster index out of range");
    d.assignments.push_back(c);
  });
  std::vector<std::vector<double>> wl(fit.draws.size());
  load_long(dir / "w_last.csv", "draw,location_id,value", [&](PosteriorDraw& d, std::size_t i, std::string_view v) {
    auto& vec = wl[static_cast<std::size_t>(&d - fit.draws.data())];
    if (vec.size() != i) throw DataError("w_last.csv: locations out of order");
    vec.push_back(csv::to_double(v, "w_last"));
  });
  for (std::size_t m = 0; m < fit.draws.size(); ++m) {
    fit.draws[m].w_last = Eigen::Map<const Eigen::VectorXd>(wl[m].data(), static_cast<Eigen::Index>(wl[m].size()));
    if (fit.draws[m].w_last.size() != static_cast<Eigen::Index>(fit.draws[m].assignments.size())) {
      throw DataError("draw " + std::to_string(m) + ": w_last and assignments cover different location counts");
    }
  }
  return fit;
}

}  // namespace strelcast::model
