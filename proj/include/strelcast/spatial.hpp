#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace strelcast {

using LocationId = std::size_t;

/// Hop distance between locations that no route connects.
inline constexpr std::size_t kNoRoute = std::numeric_limits<std::size_t>::max();

/**
 * Areal units on a rectangular grid plus their adjacency graph.
 *
 * Location ids are row-major starting at the south-west corner: id = row * cols + col,
 * row 0 being the southernmost row. The adjacency is usually queen contiguity but any
 * symmetric, loop-free edge list may be supplied, including disconnected ones.
 */
class SpatialGrid {
 public:
  /// Queen contiguity: cells sharing an edge or a vertex are neighbours.
  static SpatialGrid queen(int rows, int cols);

  /// Explicit undirected edge list. Duplicate edges are merged; self loops are rejected.
  static SpatialGrid from_edges(int rows, int cols,
                                std::span<const std::pair<LocationId, LocationId>> edges);

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return neighbors_.size(); }

  [[nodiscard]] const std::vector<LocationId>& neighbors(LocationId i) const;
  [[nodiscard]] bool adjacent(LocationId i, LocationId j) const;
  [[nodiscard]] std::size_t degree(LocationId i) const { return neighbors(i).size(); }

  /// Length of the shortest adjacency path, or kNoRoute.
  [[nodiscard]] std::size_t hop_distance(LocationId i, LocationId j) const;

  /// Hop distances from `origin` to every location (breadth-first search).
  [[nodiscard]] std::vector<std::size_t> hop_distances_from(LocationId origin) const;

  /// 0/1 adjacency matrix W.
  [[nodiscard]] Eigen::SparseMatrix<double> adjacency_matrix() const;

  [[nodiscard]] bool is_queen() const { return queen_; }
  [[nodiscard]] std::vector<std::pair<LocationId, LocationId>> edges() const;

  [[nodiscard]] LocationId location(int row, int col) const;
  [[nodiscard]] std::pair<int, int> cell(LocationId i) const;

 private:
  SpatialGrid(int rows, int cols, std::vector<std::vector<LocationId>> neighbors, bool queen);

  void check_id(LocationId i) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<LocationId>> neighbors_;
  bool queen_ = false;
};

/// Static, time-invariant location labels (e.g. "hospital").
class StaticLabels {
 public:
  StaticLabels() = default;
  explicit StaticLabels(std::size_t n_locations) : n_locations_(n_locations) {}

  void add(const std::string& name, std::span<const LocationId> ids);
  [[nodiscard]] bool has_label(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name, LocationId i) const;
  [[nodiscard]] std::vector<LocationId> members(const std::string& name) const;
  [[nodiscard]] std::vector<std::string> names() const;
  [[nodiscard]] std::size_t n_locations() const { return n_locations_; }

 private:
  std::size_t n_locations_ = 0;
  std::map<std::string, std::vector<bool>> sets_;
};

/**
 * Real-valued field over locations and discrete time steps.
 *
 * For forecast traces column 0 is the forecast origin (last observed value) and columns
 * 1..H are the future steps. For training series the columns are simply consecutive
 * time slots.
 */
class Trace {
 public:
  Trace() = default;
  explicit Trace(Eigen::MatrixXd values);

  [[nodiscard]] std::size_t n_locations() const { return static_cast<std::size_t>(values_.rows()); }
  [[nodiscard]] std::size_t n_times() const { return static_cast<std::size_t>(values_.cols()); }
  /// Number of steps after the anchor column.
  [[nodiscard]] std::size_t horizon() const { return n_times() == 0 ? 0 : n_times() - 1; }

  [[nodiscard]] double operator()(LocationId i, std::size_t t) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
  }
  [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }

  /// Columns [first, first + count).
  [[nodiscard]] Trace slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const Trace& a, const Trace& b) { return a.values_ == b.values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Grid plus labels plus optional re-projection ids as stored in a grid JSON file.
struct GridSpec {
  SpatialGrid grid = SpatialGrid::queen(1, 1);
  StaticLabels labels;
  /// Raw source cell id per location (empty when not known).
  std::vector<std::int64_t> cell_ids;
};

/// {"rows": R, "cols": C, "adjacency": "queen" | [[i,j],...], "labels": {...}, "cell_ids": [...]}
GridSpec load_grid_json(const std::filesystem::path& path);
GridSpec parse_grid_json(const std::string& text);
std::string grid_json(const GridSpec& spec);
void save_grid_json(const GridSpec& spec, const std::filesystem::path& path);

/// Trace CSV with header `location_id,time_index,value`. Every (location, time) cell must be
/// present exactly once; the location count is inferred unless `n_locations` is given.
Trace load_trace_csv(const std::filesystem::path& path, std::size_t n_locations = 0);
Trace parse_trace_csv(const std::string& text, std::size_t n_locations = 0);
std::string trace_csv(const Trace& trace);
void save_trace_csv(const Trace& trace, const std::filesystem::path& path);

}  // namespace strelcast
