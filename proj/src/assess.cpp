#include "strelcast/assess.hpp"

#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace strelcast::assess {

namespace {

void require_nonempty(std::span<const VerificationField> fields) {
  if (fields.empty()) throw std::invalid_argument("empty ensemble");
  for (const auto& f : fields) {
    if (f.size() != fields.front().size()) throw std::invalid_argument("ensemble fields differ in size");
  }
}

void require_match(std::span<const VerificationField> pred, const VerificationField& obs) {
  require_nonempty(pred);
  if (pred.front().size() != obs.size()) {
    throw std::invalid_argument("predicted fields have " + std::to_string(pred.front().size()) +
                                " locations, observed field has " + std::to_string(obs.size()));
  }
}

double quantile(std::vector<double> sorted, double p) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool on(double v) { return v != 0.0; }

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  Summary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  std::vector<double> copy(values.begin(), values.end());
  s.q10 = quantile(copy, 0.1);
  s.q90 = quantile(std::move(copy), 0.9);
  return s;
}

Eigen::VectorXd satisfaction_probability(std::span<const VerificationField> fields) {
  require_nonempty(fields);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(fields.front().values.size());
  for (const auto& f : fields) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += on(f.values[i]) ? 1.0 : 0.0;
  }
  return p / static_cast<double>(fields.size());
}

Eigen::VectorXd expected_robustness(std::span<const VerificationField> fields) {
  require_nonempty(fields);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(fields.front().values.size());
  for (const auto& f : fields) r += f.values;
  return r / static_cast<double>(fields.size());
}

std::vector<double> accuracy_per_draw(std::span<const VerificationField> pred, const VerificationField& obs) {
  require_match(pred, obs);
  std::vector<double> out;
  out.reserve(pred.size());
  const auto n = obs.values.size();
  for (const auto& f : pred) {
    double hits = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) hits += (on(f.values[i]) && on(obs.values[i])) ? 1.0 : 0.0;
    out.push_back(n == 0 ? 0.0 : hits / static_cast<double>(n));
  }
  return out;
}

Summary satisfaction_accuracy(std::span<const VerificationField> pred, const VerificationField& obs) {
  const auto v = accuracy_per_draw(pred, obs);
  return summarize(v);
}

std::vector<double> f1_per_draw(std::span<const VerificationField> pred, const VerificationField& obs) {
  require_match(pred, obs);
  std::vector<double> out;
  out.reserve(pred.size());
  for (const auto& f : pred) {
    double tp = 0.0, pred_pos = 0.0, obs_pos = 0.0;
    for (Eigen::Index i = 0; i < obs.values.size(); ++i) {
      const bool p = on(f.values[i]);
      const bool o = on(obs.values[i]);
      tp += (p && o) ? 1.0 : 0.0;
      pred_pos += p ? 1.0 : 0.0;
      obs_pos += o ? 1.0 : 0.0;
    }
    if (pred_pos == 0.0 || obs_pos == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double precision = tp / pred_pos;
    const double recall = tp / obs_pos;
    out.push_back(precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall));
  }
  return out;
}

Summary satisfaction_f1(std::span<const VerificationField> pred, const VerificationField& obs) {
  const auto v = f1_per_draw(pred, obs);
  return summarize(v);
}

namespace {

std::vector<double> mse_per_draw(std::span<const VerificationField> pred, const VerificationField& obs) {
  require_match(pred, obs);
  std::vector<double> out;
  out.reserve(pred.size());
  for (const auto& f : pred) out.push_back((f.values - obs.values).squaredNorm() / static_cast<double>(obs.size()));
  return out;
}

}  // namespace

double robustness_rmse(std::span<const VerificationField> pred, const VerificationField& obs) {
  const auto mse = mse_per_draw(pred, obs);
  double sum = 0.0;
  for (double v : mse) sum += v;
  return std::sqrt(sum / static_cast<double>(mse.size()));
}

std::vector<double> rmse_per_draw(std::span<const VerificationField> pred, const VerificationField& obs) {
  auto v = mse_per_draw(pred, obs);
  for (auto& x : v) x = std::sqrt(x);
  return v;
}

Eigen::MatrixXd co_clustering(std::span<const Partition> draws) {
  if (draws.empty()) throw std::invalid_argument("no partitions");
  const auto n = static_cast<Eigen::Index>(draws.front().size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (const auto& d : draws) {
    if (static_cast<Eigen::Index>(d.size()) != n) throw std::invalid_argument("partitions differ in size");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) P(i, j) += d[static_cast<std::size_t>(i)] == d[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
  }
  return P / static_cast<double>(draws.size());
}

double binder_loss(const Partition& candidate, const Eigen::MatrixXd& co) {
  double loss = 0.0;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    for (std::size_t j = i + 1; j < candidate.size(); ++j) {
      const double same = candidate[i] == candidate[j] ? 1.0 : 0.0;
      loss += std::abs(same - co(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return loss;
}

BinderEstimate binder_partition(std::span<const Partition> draws) {
  const auto co = co_clustering(draws);
  BinderEstimate best{draws.front(), 0, binder_loss(draws.front(), co)};
  for (std::size_t m = 1; m < draws.size(); ++m) {
    const double loss = binder_loss(draws[m], co);
    if (loss < best.loss) best = {draws[m], m, loss};
  }
  return best;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions differ in size");
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [k, v] : joint) index += choose2(v);
  for (const auto& [k, v] : ra) sa += choose2(v);
  for (const auto& [k, v] : rb) sb += choose2(v);
  const double total = choose2(static_cast<double>(a.size()));
  const double expected = total == 0.0 ? 0.0 : sa * sb / total;
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 1.0;  // both trivial partitions
  return (index - expected) / (max_index - expected);
}

std::string report_csv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "window_id,property,measure,statistic,value\n";
  for (const auto& r : rows) {
    out << r.window_id << ',' << r.property << ',' << r.measure << ',' << r.statistic << ',' << csv::format(r.value) << '\n';
  }
  return out.str();
}

std::string fields_csv(std::span<const FieldRow> rows) {
  std::ostringstream out;
  out << "window_id,property,location_id,satisfaction_prob,expected_robustness\n";
  for (const auto& r : rows) {
    out << r.window_id << ',' << r.property << ',' << r.location_id << ',' << csv::format(r.satisfaction_prob) << ','
        << csv::format(r.expected_robustness) << '\n';
  }
  return out.str();
}

std::string verification_csv(const VerificationField& field) {
  std::ostringstream out;
  out << "location_id,mode,value\n";
  const char* mode = field.mode == strel::MonitorMode::boolean ? "boolean" : "robustness";
  for (Eigen::Index i = 0; i < field.values.size(); ++i) out << i << ',' << mode << ',' << csv::format(field.values[i]) << '\n';
  return out.str();
}

VerificationField parse_verification_csv(const std::string& text) {
  const auto rows = csv::lines(text);
  if (rows.empty() || csv::trim(rows[0]) != "location_id,mode,value") {
    throw DataError("verification CSV header must be 'location_id,mode,value'");
  }
  VerificationField field;
  field.values.resize(static_cast<Eigen::Index>(rows.size() - 1));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto f = csv::split(rows[r]);
    if (f.size() != 3) throw DataError("verification CSV line " + std::to_string(r + 1) + " needs 3 fields");
    if (csv::to_int(f[0], "location_id") != static_cast<std::int64_t>(r - 1)) {
      throw DataError("verification CSV locations must be listed in order from 0");
    }
    const auto mode = csv::trim(f[1]);
    const auto parsed = mode == "boolean" ? strel::MonitorMode::boolean : strel::MonitorMode::robustness;
    if (mode != "boolean" && mode != "robustness") throw DataError("unknown verification mode '" + std::string(mode) + "'");
    if (r > 1 && parsed != field.mode) throw DataError("verification CSV mixes modes");
    field.mode = parsed;
    field.values[static_cast<Eigen::Index>(r - 1)] = csv::to_double(f[2], "value");
  }
  return field;
}

}  // namespace strelcast::assess
