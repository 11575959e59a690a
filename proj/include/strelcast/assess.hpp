#pragma once

#include "strelcast/monitor.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace strelcast::assess {

using strel::VerificationField;

/// Posterior spread of a per-draw quantity.
struct Summary {
  double mean = 0.0;
  double sd = 0.0;   // sample standard deviation, 0 for a single draw
  double q10 = 0.0;  // linearly interpolated quantiles
  double q90 = 0.0;
};

Summary summarize(std::span<const double> values);

/// Per-location share of draws that satisfy. Throws std::invalid_argument if empty.
Eigen::VectorXd satisfaction_probability(std::span<const VerificationField> fields);

/// Per-location mean robustness. Throws std::invalid_argument if empty.
Eigen::VectorXd expected_robustness(std::span<const VerificationField> fields);

/// (1/I) Σ_i 1{pred_i = 1} 1{obs_i = 1} per draw. No true-negative term, so it is a
/// matched-positive rate rather than classification accuracy.
std::vector<double> accuracy_per_draw(std::span<const VerificationField> pred, const VerificationField& obs);
Summary satisfaction_accuracy(std::span<const VerificationField> pred, const VerificationField& obs);

/// F1 per draw; a draw whose precision or recall is undefined scores 0.
std::vector<double> f1_per_draw(std::span<const VerificationField> pred, const VerificationField& obs);
Summary satisfaction_f1(std::span<const VerificationField> pred, const VerificationField& obs);

/// sqrt of the mean over draws of each draw's mean squared deviation from `obs`.
double robustness_rmse(std::span<const VerificationField> pred, const VerificationField& obs);
/// sqrt(MSE) of each draw separately; used for the spread of the RMSE.
std::vector<double> rmse_per_draw(std::span<const VerificationField> pred, const VerificationField& obs);

using Partition = std::vector<std::size_t>;

/// P_ij = share of draws placing i and j together.
Eigen::MatrixXd co_clustering(std::span<const Partition> draws);

/// Σ_{i<j} |1{c_i = c_j} - P_ij|.
double binder_loss(const Partition& candidate, const Eigen::MatrixXd& co_clustering);

struct BinderEstimate {
  Partition partition;
  std::size_t draw_index = 0;
  double loss = 0.0;
};

/// Sampled partition with the smallest Binder loss (ties: earliest draw).
BinderEstimate binder_partition(std::span<const Partition> draws);

double adjusted_rand_index(const Partition& a, const Partition& b);

struct ReportRow {
  std::string window_id;
  std::string property;
  std::string measure;
  std::string statistic;
  double value = 0.0;
};

/// `window_id,property,measure,statistic,value`
std::string report_csv(std::span<const ReportRow> rows);

struct FieldRow {
  std::string window_id;
  std::string property;
  std::size_t location_id = 0;
  double satisfaction_prob = 0.0;
  double expected_robustness = 0.0;
};

/// `window_id,property,location_id,satisfaction_prob,expected_robustness`
std::string fields_csv(std::span<const FieldRow> rows);

/// `location_id,mode,value` for one verification field.
std::string verification_csv(const VerificationField& field);
/// Inverse of verification_csv; throws DataError on malformed input.
VerificationField parse_verification_csv(const std::string& text);

}  // namespace strelcast::assess
