#pragma once

#include "strelcast/formula.hpp"
#include "strelcast/spatial.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace strelcast::strel {

enum class MonitorMode { boolean, robustness };

/// Robustness magnitude of a crisp label proposition. Finite so that min/max arithmetic
/// stays well defined.
inline constexpr double kLabelRobustness = 1e9;

/// Per-location verdict at the anchor (column 0) of a trace: 0/1 in boolean mode, a signed
/// margin (possibly +-inf from constants) in robustness mode.
struct VerificationField {
  MonitorMode mode = MonitorMode::boolean;
  Eigen::VectorXd values;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// Boolean satisfaction at every location. Throws HorizonError if the trace is shorter
/// than temporal_depth(formula) and std::invalid_argument on dimension or label mismatches.
VerificationField boolean_monitor(const Formula& formula, const Trace& trace,
                                  const SpatialGrid& grid, const StaticLabels& labels);

/// Quantitative (robustness) semantics at every location; same preconditions.
VerificationField quantitative_monitor(const Formula& formula, const Trace& trace,
                                       const SpatialGrid& grid, const StaticLabels& labels);

/// Runs the selected monitor on every trace, evaluating traces concurrently with OpenMP.
/// Output order follows input order.
std::vector<VerificationField> monitor_ensemble(const Formula& formula, std::span<const Trace> traces,
                                                const SpatialGrid& grid, const StaticLabels& labels,
                                                MonitorMode mode);

/// Single-threaded reference for monitor_ensemble.
std::vector<VerificationField> monitor_ensemble_serial(const Formula& formula,
                                                       std::span<const Trace> traces,
                                                       const SpatialGrid& grid,
                                                       const StaticLabels& labels, MonitorMode mode);

/// Satisfaction derived from robustness: r >= 0 counts as satisfied.
VerificationField satisfaction_from_robustness(const VerificationField& robustness);

}  // namespace strelcast::strel
