#include "strelcast/monitor.hpp"

#include "strelcast/errors.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace strelcast::strel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Values of a subformula at every location for time offsets 0..len-1 after the anchor.
template <typename T>
struct Table {
  std::size_t n = 0;
  std::size_t len = 0;
  std::vector<T> v;

  Table(std::size_t n_, std::size_t len_, T fill = T{}) : n(n_), len(len_), v(n_ * len_, fill) {}

  T& at(std::size_t i, std::size_t t) { return v[t * n + i]; }
  const T& at(std::size_t i, std::size_t t) const { return v[t * n + i]; }
};

void check_inputs(const Formula& formula, const Trace& trace, const SpatialGrid& grid,
                  const StaticLabels& labels) {
  if (trace.n_locations() != grid.size()) {
    throw std::invalid_argument("trace has " + std::to_string(trace.n_locations()) +
                                " locations but the grid has " + std::to_string(grid.size()));
  }
  if (labels.n_locations() != 0 && labels.n_locations() != grid.size()) {
    throw std::invalid_argument("labels are defined over " + std::to_string(labels.n_locations()) +
                                " locations but the grid has " + std::to_string(grid.size()));
  }
  for (const auto& name : labels_used(formula)) {
    if (!labels.has_label(name)) {
      throw std::invalid_argument("formula references undefined label '" + name + "'");
    }
  }
  const auto required = temporal_depth(formula);
  if (trace.n_times() == 0 || required > trace.horizon()) {
    throw HorizonError(required, trace.horizon());
  }
}

/// All-pairs hop distances, computed lazily once per monitor call.
class DistanceCache {
 public:
  explicit DistanceCache(const SpatialGrid& grid) : grid_(grid) {}

  const std::vector<std::size_t>& from(LocationId i) {
    if (rows_.empty()) {
      rows_.resize(grid_.size());
      for (std::size_t k = 0; k < grid_.size(); ++k) rows_[k] = grid_.hop_distances_from(k);
    }
    return rows_[i];
  }

 private:
  const SpatialGrid& grid_;
  std::vector<std::vector<std::size_t>> rows_;
};

// ---------------------------------------------------------------------------
// Boolean semantics

class BooleanEvaluator {
 public:
  BooleanEvaluator(const Trace& trace, const SpatialGrid& grid, const StaticLabels& labels)
      : trace_(trace), grid_(grid), labels_(labels), dist_(grid) {}

  Table<char> eval(const Formula& f, std::size_t len) {
    const std::size_t n = grid_.size();
    return std::visit(
        overloaded{
            [&](const Constant& x) { return Table<char>(n, len, x.value ? 1 : 0); },
            [&](const AtomicCompare& x) {
              Table<char> out(n, len);
              for (std::size_t t = 0; t < len; ++t) {
                for (std::size_t i = 0; i < n; ++i) {
                  const double y = trace_(i, t);
                  out.at(i, t) = x.direction == Compare::greater ? (y > x.threshold) : (y < x.threshold);
                }
              }
              return out;
            },
            [&](const AtomicLabel& x) {
              Table<char> out(n, len);
              for (std::size_t i = 0; i < n; ++i) {
                const char member = labels_.contains(x.name, i) ? 1 : 0;
                for (std::size_t t = 0; t < len; ++t) out.at(i, t) = member;
              }
              return out;
            },
            [&](const Not& x) {
              auto out = eval(x.operand, len);
              for (auto& b : out.v) b = !b;
              return out;
            },
            [&](const And& x) { return combine(x.lhs, x.rhs, len, [](char a, char b) { return a && b; }); },
            [&](const Or& x) { return combine(x.lhs, x.rhs, len, [](char a, char b) { return a || b; }); },
            [&](const Implies& x) {
              return combine(x.lhs, x.rhs, len, [](char a, char b) { return !a || b; });
            },
            [&](const Eventually& x) { return window(x.operand, x.lo, x.hi, len, true); },
            [&](const Always& x) { return window(x.operand, x.lo, x.hi, len, false); },
            [&](const Reach& x) { return reach(x, len); },
            [&](const Escape& x) { return escape(x, len); },
            [&](const Somewhere& x) { return somewhere(x, len); },
        },
        static_cast<const NodeVariant&>(f.node()));
  }

 private:
  template <typename Op>
  Table<char> combine(const Formula& a, const Formula& b, std::size_t len, Op op) {
    auto lhs = eval(a, len);
    const auto rhs = eval(b, len);
    for (std::size_t k = 0; k < lhs.v.size(); ++k) lhs.v[k] = op(lhs.v[k], rhs.v[k]) ? 1 : 0;
    return lhs;
  }

  Table<char> window(const Formula& operand, std::size_t lo, std::size_t hi, std::size_t len,
                     bool exists) {
    const auto inner = eval(operand, len + hi);
    Table<char> out(grid_.size(), len);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        bool acc = !exists;
        for (std::size_t u = t + lo; u <= t + hi; ++u) {
          if (exists) {
            acc = acc || inner.at(i, u);
          } else {
            acc = acc && inner.at(i, u);
          }
        }
        out.at(i, t) = acc ? 1 : 0;
      }
    }
    return out;
  }

  // Locations that can reach a rhs-location within d hops through lhs-locations, grown
  // one hop at a time from the rhs set.
  Table<char> reach(const Reach& x, std::size_t len) {
    const auto pass = eval(x.lhs, len);
    auto out = eval(x.rhs, len);
    const std::size_t n = grid_.size();
    std::vector<char> next(n);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t step = 0; step < x.d_max; ++step) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
          next[i] = out.at(i, t);
          if (next[i] || !pass.at(i, t)) continue;
          for (const auto j : grid_.neighbors(i)) {
            if (out.at(j, t)) {
              next[i] = 1;
              changed = true;
              break;
            }
          }
        }
        for (std::size_t i = 0; i < n; ++i) out.at(i, t) = next[i];
        if (!changed) break;
      }
    }
    return out;
  }

  // Explores the operand-subgraph from each origin and checks the endpoint distances.
  Table<char> escape(const Escape& x, std::size_t len) {
    const auto inner = eval(x.operand, len);
    const std::size_t n = grid_.size();
    Table<char> out(n, len);
    std::vector<char> visited(n);
    std::vector<LocationId> stack;
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!inner.at(i, t)) continue;
        const auto& d = dist_.from(i);
        std::fill(visited.begin(), visited.end(), 0);
        stack.assign(1, i);
        visited[i] = 1;
        bool found = false;
        while (!stack.empty() && !found) {
          const auto u = stack.back();
          stack.pop_back();
          if (d[u] != kNoRoute && d[u] >= x.d_lo && d[u] <= x.d_hi) found = true;
          for (const auto v : grid_.neighbors(u)) {
            if (!visited[v] && inner.at(v, t)) {
              visited[v] = 1;
              stack.push_back(v);
            }
          }
        }
        out.at(i, t) = found ? 1 : 0;
      }
    }
    return out;
  }

  Table<char> somewhere(const Somewhere& x, std::size_t len) {
    const auto inner = eval(x.operand, len);
    const std::size_t n = grid_.size();
    Table<char> out(n, len);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = dist_.from(i);
      for (std::size_t t = 0; t < len; ++t) {
        char any = 0;
        for (std::size_t l = 0; l < n && !any; ++l) {
          if (d[l] <= x.d_max && inner.at(l, t)) any = 1;
        }
        out.at(i, t) = any;
      }
    }
    return out;
  }

  const Trace& trace_;
  const SpatialGrid& grid_;
  const StaticLabels& labels_;
  DistanceCache dist_;
};

// ---------------------------------------------------------------------------
// Quantitative semantics

class RobustnessEvaluator {
 public:
  RobustnessEvaluator(const Trace& trace, const SpatialGrid& grid, const StaticLabels& labels)
      : trace_(trace), grid_(grid), labels_(labels), dist_(grid) {}

  Table<double> eval(const Formula& f, std::size_t len) {
    const std::size_t n = grid_.size();
    return std::visit(
        overloaded{
            [&](const Constant& x) { return Table<double>(n, len, x.value ? kInf : -kInf); },
            [&](const AtomicCompare& x) {
              Table<double> out(n, len);
              for (std::size_t t = 0; t < len; ++t) {
                for (std::size_t i = 0; i < n; ++i) {
                  const double y = trace_(i, t);
                  out.at(i, t) = x.direction == Compare::greater ? y - x.threshold : x.threshold - y;
                }
              }
              return out;
            },
            [&](const AtomicLabel& x) {
              Table<double> out(n, len);
              for (std::size_t i = 0; i < n; ++i) {
                const double r = labels_.contains(x.name, i) ? kLabelRobustness : -kLabelRobustness;
                for (std::size_t t = 0; t < len; ++t) out.at(i, t) = r;
              }
              return out;
            },
            [&](const Not& x) {
              auto out = eval(x.operand, len);
              for (auto& r : out.v) r = -r;
              return out;
            },
            [&](const And& x) {
              return combine(x.lhs, x.rhs, len, [](double a, double b) { return std::min(a, b); });
            },
            [&](const Or& x) {
              return combine(x.lhs, x.rhs, len, [](double a, double b) { return std::max(a, b); });
            },
            [&](const Implies& x) {
              return combine(x.lhs, x.rhs, len, [](double a, double b) { return std::max(-a, b); });
            },
            [&](const Eventually& x) { return window(x.operand, x.lo, x.hi, len, true); },
            [&](const Always& x) { return window(x.operand, x.lo, x.hi, len, false); },
            [&](const Reach& x) { return reach(x, len); },
            [&](const Escape& x) { return escape(x, len); },
            [&](const Somewhere& x) { return somewhere(x, len); },
        },
        static_cast<const NodeVariant&>(f.node()));
  }

 private:
  template <typename Op>
  Table<double> combine(const Formula& a, const Formula& b, std::size_t len, Op op) {
    auto lhs = eval(a, len);
    const auto rhs = eval(b, len);
    for (std::size_t k = 0; k < lhs.v.size(); ++k) lhs.v[k] = op(lhs.v[k], rhs.v[k]);
    return lhs;
  }

  Table<double> window(const Formula& operand, std::size_t lo, std::size_t hi, std::size_t len,
                       bool sup) {
    const auto inner = eval(operand, len + hi);
    Table<double> out(grid_.size(), len);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        double acc = sup ? -kInf : kInf;
        for (std::size_t u = t + lo; u <= t + hi; ++u) {
          acc = sup ? std::max(acc, inner.at(i, u)) : std::min(acc, inner.at(i, u));
        }
        out.at(i, t) = acc;
      }
    }
    return out;
  }

  // D_0 = r_rhs; D_{m+1}(i) = max(D_m(i), max_{j in N(i)} min(r_lhs(i), D_m(j))).
  Table<double> reach(const Reach& x, std::size_t len) {
    const auto pass = eval(x.lhs, len);
    auto out = eval(x.rhs, len);
    const std::size_t n = grid_.size();
    std::vector<double> next(n);
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t step = 0; step < x.d_max; ++step) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
          double best = out.at(i, t);
          for (const auto j : grid_.neighbors(i)) {
            best = std::max(best, std::min(pass.at(i, t), out.at(j, t)));
          }
          changed = changed || best != out.at(i, t);
          next[i] = best;
        }
        for (std::size_t i = 0; i < n; ++i) out.at(i, t) = next[i];
        if (!changed) break;
      }
    }
    return out;
  }

  // Widest-route values e(i, j) over operand-routes from i to j, then the best endpoint at an
  // admissible hop distance.
  Table<double> escape(const Escape& x, std::size_t len) {
    const auto inner = eval(x.operand, len);
    const std::size_t n = grid_.size();
    Table<double> out(n, len);
    Eigen::MatrixXd e(n, n);
    Eigen::MatrixXd next(n, n);
    for (std::size_t t = 0; t < len; ++t) {
      e.setConstant(-kInf);
      for (std::size_t i = 0; i < n; ++i) e(i, i) = inner.at(i, t);
      for (std::size_t iter = 0; iter + 1 < n; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
          const double ri = inner.at(i, t);
          for (std::size_t j = 0; j < n; ++j) {
            double best = e(i, j);
            for (const auto k : grid_.neighbors(i)) best = std::max(best, std::min(ri, e(k, j)));
            changed = changed || best != e(i, j);
            next(i, j) = best;
          }
        }
        e.swap(next);
        if (!changed) break;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& d = dist_.from(i);
        double best = -kInf;
        for (std::size_t j = 0; j < n; ++j) {
          if (d[j] != kNoRoute && d[j] >= x.d_lo && d[j] <= x.d_hi) best = std::max(best, e(i, j));
        }
        out.at(i, t) = best;
      }
    }
    return out;
  }

  Table<double> somewhere(const Somewhere& x, std::size_t len) {
    const auto inner = eval(x.operand, len);
    const std::size_t n = grid_.size();
    Table<double> out(n, len);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = dist_.from(i);
      for (std::size_t t = 0; t < len; ++t) {
        double best = -kInf;
        for (std::size_t l = 0; l < n; ++l) {
          if (d[l] <= x.d_max) best = std::max(best, inner.at(l, t));
        }
        out.at(i, t) = best;
      }
    }
    return out;
  }

  const Trace& trace_;
  const SpatialGrid& grid_;
  const StaticLabels& labels_;
  DistanceCache dist_;
};

VerificationField anchor_column(const Table<char>& table) {
  VerificationField out{MonitorMode::boolean, Eigen::VectorXd(static_cast<Eigen::Index>(table.n))};
  for (std::size_t i = 0; i < table.n; ++i) out.values[static_cast<Eigen::Index>(i)] = table.at(i, 0) ? 1.0 : 0.0;
  return out;
}

VerificationField anchor_column(const Table<double>& table) {
  VerificationField out{MonitorMode::robustness, Eigen::VectorXd(static_cast<Eigen::Index>(table.n))};
  for (std::size_t i = 0; i < table.n; ++i) out.values[static_cast<Eigen::Index>(i)] = table.at(i, 0);
  return out;
}

VerificationField run_monitor(const Formula& formula, const Trace& trace, const SpatialGrid& grid,
                              const StaticLabels& labels, MonitorMode mode) {
  return mode == MonitorMode::boolean ? boolean_monitor(formula, trace, grid, labels)
                                      : quantitative_monitor(formula, trace, grid, labels);
}

void check_ensemble(std::span<const Trace> traces) {
  for (const auto& tr : traces) {
    if (tr.n_locations() != traces.front().n_locations() || tr.n_times() != traces.front().n_times()) {
      throw std::invalid_argument("ensemble traces must share dimensions");
    }
  }
}

}  // namespace

VerificationField boolean_monitor(const Formula& formula, const Trace& trace, const SpatialGrid& grid,
                                  const StaticLabels& labels) {
  check_inputs(formula, trace, grid, labels);
  BooleanEvaluator eval(trace, grid, labels);
  return anchor_column(eval.eval(formula, 1));
}

VerificationField quantitative_monitor(const Formula& formula, const Trace& trace,
                                       const SpatialGrid& grid, const StaticLabels& labels) {
  check_inputs(formula, trace, grid, labels);
  RobustnessEvaluator eval(trace, grid, labels);
  return anchor_column(eval.eval(formula, 1));
}

std::vector<VerificationField> monitor_ensemble_serial(const Formula& formula,
                                                       std::span<const Trace> traces,
                                                       const SpatialGrid& grid,
                                                       const StaticLabels& labels, MonitorMode mode) {
  check_ensemble(traces);
  std::vector<VerificationField> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) out.push_back(run_monitor(formula, trace, grid, labels, mode));
  return out;
}

std::vector<VerificationField> monitor_ensemble(const Formula& formula, std::span<const Trace> traces,
                                                const SpatialGrid& grid, const StaticLabels& labels,
                                                MonitorMode mode) {
  check_ensemble(traces);
  if (!traces.empty()) check_inputs(formula, traces.front(), grid, labels);
  std::vector<VerificationField> out(traces.size());
  const auto count = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    out[static_cast<std::size_t>(m)] =
        run_monitor(formula, traces[static_cast<std::size_t>(m)], grid, labels, mode);
  }
  return out;
}

VerificationField satisfaction_from_robustness(const VerificationField& robustness) {
  if (robustness.mode != MonitorMode::robustness) {
    throw std::invalid_argument("satisfaction_from_robustness expects a robustness field");
  }
  VerificationField out{MonitorMode::boolean, robustness.values};
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values[i] = robustness.values[i] >= 0.0 ? 1.0 : 0.0;
  return out;
}

}  // namespace strelcast::strel
