#include "strelcast/spatial.hpp"

#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace strelcast {

using json = nlohmann::json;

namespace {

void check_dims(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be positive, got " + std::to_string(rows) +
                                "x" + std::to_string(cols));
  }
}

}  // namespace

SpatialGrid::SpatialGrid(int rows, int cols, std::vector<std::vector<LocationId>> neighbors,
                         bool queen)
    : rows_(rows), cols_(cols), neighbors_(std::move(neighbors)), queen_(queen) {}

SpatialGrid SpatialGrid::queen(int rows, int cols) {
  check_dims(rows, cols);
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<std::vector<LocationId>> nb(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& list = nb[static_cast<std::size_t>(r * cols + c)];
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          list.push_back(static_cast<LocationId>(rr * cols + cc));
        }
      }
      std::sort(list.begin(), list.end());
    }
  }
  return SpatialGrid(rows, cols, std::move(nb), true);
}

SpatialGrid SpatialGrid::from_edges(int rows, int cols,
                                    std::span<const std::pair<LocationId, LocationId>> edges) {
  check_dims(rows, cols);
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<std::vector<LocationId>> nb(n);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") references a location outside the grid");
    }
    if (a == b) throw std::invalid_argument("self loop at location " + std::to_string(a));
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  for (auto& list : nb) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return SpatialGrid(rows, cols, std::move(nb), false);
}

void SpatialGrid::check_id(LocationId i) const {
  if (i >= size()) {
    throw std::invalid_argument("location id " + std::to_string(i) + " out of range [0," +
                                std::to_string(size()) + ")");
  }
}

const std::vector<LocationId>& SpatialGrid::neighbors(LocationId i) const {
  check_id(i);
  return neighbors_[i];
}

bool SpatialGrid::adjacent(LocationId i, LocationId j) const {
  const auto& list = neighbors(i);
  check_id(j);
  return std::binary_search(list.begin(), list.end(), j);
}

std::vector<std::size_t> SpatialGrid::hop_distances_from(LocationId origin) const {
  check_id(origin);
  std::vector<std::size_t> dist(size(), kNoRoute);
  std::deque<LocationId> queue{origin};
  dist[origin] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto v : neighbors_[u]) {
      if (dist[v] == kNoRoute) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::size_t SpatialGrid::hop_distance(LocationId i, LocationId j) const {
  check_id(j);
  if (i == j) {
    check_id(i);
    return 0;
  }
  return hop_distances_from(i)[j];
}

Eigen::SparseMatrix<double> SpatialGrid::adjacency_matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto j : neighbors_[i]) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::SparseMatrix<double> w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

std::vector<std::pair<LocationId, LocationId>> SpatialGrid::edges() const {
  std::vector<std::pair<LocationId, LocationId>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto j : neighbors_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

LocationId SpatialGrid::location(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw std::invalid_argument("cell (" + std::to_string(row) + "," + std::to_string(col) +
                                ") outside the grid");
  }
  return static_cast<LocationId>(row * cols_ + col);
}

std::pair<int, int> SpatialGrid::cell(LocationId i) const {
  check_id(i);
  return {static_cast<int>(i) / cols_, static_cast<int>(i) % cols_};
}

// ---------------------------------------------------------------------------

void StaticLabels::add(const std::string& name, std::span<const LocationId> ids) {
  if (name.empty()) throw std::invalid_argument("label name must not be empty");
  auto& set = sets_[name];
  set.resize(n_locations_, false);
  for (const auto id : ids) {
    if (id >= n_locations_) {
      throw std::invalid_argument("label '" + name + "' references location " +
                                  std::to_string(id) + " outside [0," +
                                  std::to_string(n_locations_) + ")");
    }
    set[id] = true;
  }
}

bool StaticLabels::has_label(const std::string& name) const { return sets_.contains(name); }

bool StaticLabels::contains(const std::string& name, LocationId i) const {
  const auto it = sets_.find(name);
  if (it == sets_.end()) return false;
  return i < it->second.size() && it->second[i];
}

std::vector<LocationId> StaticLabels::members(const std::string& name) const {
  std::vector<LocationId> out;
  const auto it = sets_.find(name);
  if (it == sets_.end()) return out;
  for (std::size_t i = 0; i < it->second.size(); ++i) {
    if (it->second[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::string> StaticLabels::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sets_) out.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------

Trace::Trace(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() == 0) throw std::invalid_argument("trace must have at least one location");
  if (!values_.allFinite()) throw std::invalid_argument("trace values must be finite");
}

Trace Trace::slice(std::size_t first, std::size_t count) const {
  if (first + count > n_times() || count == 0) {
    throw std::invalid_argument("trace slice [" + std::to_string(first) + "," +
                                std::to_string(first + count) + ") outside [0," +
                                std::to_string(n_times()) + ")");
  }
  return Trace(values_.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)));
}

// ---------------------------------------------------------------------------

GridSpec parse_grid_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("grid JSON: ") + e.what());
  }
  try {
    const int rows = doc.at("rows").get<int>();
    const int cols = doc.at("cols").get<int>();
    GridSpec spec;
    const auto adjacency = doc.value("adjacency", json("queen"));
    if (adjacency.is_string()) {
      if (adjacency.get<std::string>() != "queen") {
        throw DataError("grid JSON: unknown adjacency '" + adjacency.get<std::string>() + "'");
      }
      spec.grid = SpatialGrid::queen(rows, cols);
    } else {
      std::vector<std::pair<LocationId, LocationId>> edges;
      for (const auto& e : adjacency) {
        if (!e.is_array() || e.size() != 2) throw DataError("grid JSON: edges must be [i, j] pairs");
        edges.emplace_back(e[0].get<LocationId>(), e[1].get<LocationId>());
      }
      spec.grid = SpatialGrid::from_edges(rows, cols, edges);
    }
    spec.labels = StaticLabels(spec.grid.size());
    if (doc.contains("labels")) {
      for (const auto& [name, ids] : doc.at("labels").items()) {
        const auto list = ids.get<std::vector<LocationId>>();
        spec.labels.add(name, list);
      }
    }
    if (doc.contains("cell_ids")) {
      spec.cell_ids = doc.at("cell_ids").get<std::vector<std::int64_t>>();
      if (spec.cell_ids.size() != spec.grid.size()) {
        throw DataError("grid JSON: cell_ids has " + std::to_string(spec.cell_ids.size()) +
                        " entries, grid has " + std::to_string(spec.grid.size()) + " locations");
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw DataError(std::string("grid JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("grid JSON: ") + e.what());
  }
}

GridSpec load_grid_json(const std::filesystem::path& path) {
  return parse_grid_json(csv::read_file(path));
}

std::string grid_json(const GridSpec& spec) {
  json doc;
  doc["rows"] = spec.grid.rows();
  doc["cols"] = spec.grid.cols();
  if (spec.grid.is_queen()) {
    doc["adjacency"] = "queen";
  } else {
    json edges = json::array();
    for (const auto& [a, b] : spec.grid.edges()) edges.push_back({a, b});
    doc["adjacency"] = edges;
  }
  json labels = json::object();
  for (const auto& name : spec.labels.names()) labels[name] = spec.labels.members(name);
  doc["labels"] = labels;
  if (!spec.cell_ids.empty()) doc["cell_ids"] = spec.cell_ids;
  return doc.dump(2) + "\n";
}

void save_grid_json(const GridSpec& spec, const std::filesystem::path& path) {
  csv::write_file(path, grid_json(spec));
}

Trace parse_trace_csv(const std::string& text, std::size_t n_locations) {
  const auto rows = csv::lines(text);
  if (rows.empty()) throw DataError("trace CSV is empty");
  const auto header = csv::split(rows.front());
  if (header.size() != 3 || csv::trim(header[0]) != "location_id" ||
      csv::trim(header[1]) != "time_index" || csv::trim(header[2]) != "value") {
    throw DataError("trace CSV header must be 'location_id,time_index,value'");
  }
  struct Entry {
    std::size_t loc;
    std::size_t time;
    double value;
  };
  std::vector<Entry> entries;
  entries.reserve(rows.size() - 1);
  std::size_t max_loc = 0;
  std::size_t max_time = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto fields = csv::split(rows[r]);
    if (fields.size() != 3) {
      throw DataError("trace CSV line " + std::to_string(r + 1) + ": expected 3 fields");
    }
    const auto loc = csv::to_int(fields[0], "location_id");
    const auto time = csv::to_int(fields[1], "time_index");
    if (loc < 0 || time < 0) {
      throw DataError("trace CSV line " + std::to_string(r + 1) + ": negative index");
    }
    const double value = csv::to_double(fields[2], "value");
    if (!std::isfinite(value)) {
      throw DataError("trace CSV line " + std::to_string(r + 1) + ": non-finite value");
    }
    entries.push_back({static_cast<std::size_t>(loc), static_cast<std::size_t>(time), value});
    max_loc = std::max(max_loc, entries.back().loc);
    max_time = std::max(max_time, entries.back().time);
  }
  if (entries.empty()) throw DataError("trace CSV has no data rows");
  const std::size_t n_loc = n_locations == 0 ? max_loc + 1 : n_locations;
  if (max_loc >= n_loc) {
    throw DataError("trace CSV references location " + std::to_string(max_loc) + " but grid has " +
                    std::to_string(n_loc));
  }
  const std::size_t n_time = max_time + 1;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n_loc), static_cast<Eigen::Index>(n_time));
  std::vector<char> seen(n_loc * n_time, 0);
  for (const auto& e : entries) {
    auto& flag = seen[e.loc * n_time + e.time];
    if (flag) {
      throw DataError("trace CSV: duplicate entry for location " + std::to_string(e.loc) +
                      ", time " + std::to_string(e.time));
    }
    flag = 1;
    values(static_cast<Eigen::Index>(e.loc), static_cast<Eigen::Index>(e.time)) = e.value;
  }
  for (std::size_t loc = 0; loc < n_loc; ++loc) {
    for (std::size_t t = 0; t < n_time; ++t) {
      if (!seen[loc * n_time + t]) {
        throw DataError("trace CSV: missing value for location " + std::to_string(loc) +
                        ", time " + std::to_string(t));
      }
    }
  }
  return Trace(std::move(values));
}

Trace load_trace_csv(const std::filesystem::path& path, std::size_t n_locations) {
  return parse_trace_csv(csv::read_file(path), n_locations);
}

std::string trace_csv(const Trace& trace) {
  std::string out = "location_id,time_index,value\n";
  for (std::size_t i = 0; i < trace.n_locations(); ++i) {
    for (std::size_t t = 0; t < trace.n_times(); ++t) {
      out += std::to_string(i);
      out += ',';
      out += std::to_string(t);
      out += ',';
      out += csv::format(trace(i, t));
      out += '\n';
    }
  }
  return out;
}

void save_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  csv::write_file(path, trace_csv(trace));
}

}  // namespace strelcast
