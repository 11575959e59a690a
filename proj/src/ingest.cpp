#include "strelcast/ingest.hpp"

#include "strelcast/csv.hpp"
#include "strelcast/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace strelcast {

namespace {

bool looks_numeric(std::string_view s) {
  s = csv::trim(s);
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' || s[0] == '+');
}

}  // namespace

IngestResult ingest(const std::string& raw_csv, const IngestOptions& o, const std::optional<GridSpec>& labels_from) {
  if (o.source_cols < 1 || o.rows < 1 || o.cols < 1 || o.row0 < 0 || o.col0 < 0 || o.col0 + o.cols > o.source_cols) {
    throw std::invalid_argument("subgrid selection does not fit the source grid");
  }
  const auto n = static_cast<std::size_t>(o.rows) * static_cast<std::size_t>(o.cols);
  const auto local_id = [&](std::int64_t cell) -> std::optional<std::size_t> {
    const auto offset = cell - o.id_base;
    if (offset < 0) throw DataError("unknown cell id " + std::to_string(cell) + " (below the id base)");
    const auto r = static_cast<int>(offset / o.source_cols) - o.row0;
    const auto c = static_cast<int>(offset % o.source_cols) - o.col0;
    if (r < 0 || r >= o.rows || c < 0 || c >= o.cols) return std::nullopt;
    return static_cast<std::size_t>(r * o.cols + c);
  };

  std::map<std::pair<std::size_t, std::int64_t>, double> sums;
  std::set<std::int64_t> slot_set;
  const auto rows = csv::lines(raw_csv);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto f = csv::split(rows[k], rows[k].find('\t') != std::string_view::npos ? '\t' : ',');
    if (k == 0 && !looks_numeric(f[0])) continue;  // header
    if (f.size() < 3) throw DataError("line " + std::to_string(k + 1) + ": need cell id, time slot and activity columns");
    const auto cell = csv::to_int(f[0], "cell id");
    const auto slot = csv::to_int(f[1], "time slot");
    double total = 0.0;
    for (std::size_t c = 2; c < f.size(); ++c) {
      if (!csv::trim(f[c]).empty()) total += csv::to_double(f[c], "activity");
    }
    const auto id = local_id(cell);
    if (!id) continue;
    sums[{*id, slot}] += total;
    slot_set.insert(slot);
  }
  if (slot_set.empty()) throw DataError("no records fall inside the selected subgrid");

  const std::vector<std::int64_t> observed(slot_set.begin(), slot_set.end());
  std::int64_t step = 0;
  for (std::size_t k = 1; k < observed.size(); ++k) {
    const auto gap = observed[k] - observed[k - 1];
    step = step == 0 ? gap : std::min(step, gap);
  }
  std::vector<std::int64_t> slots;
  for (std::int64_t s = observed.front(); s <= observed.back(); s += (step == 0 ? 1 : step)) {
    slots.push_back(s);
    if (step == 0) break;
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(slots.size()));
  std::vector<std::int64_t> cell_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::int64_t>(i) / o.cols + o.row0;
    const auto c = static_cast<std::int64_t>(i) % o.cols + o.col0;
    cell_ids[i] = o.id_base + r * o.source_cols + c;
    std::vector<std::int64_t> gaps;
    for (std::size_t t = 0; t < slots.size(); ++t) {
      const auto it = sums.find({i, slots[t]});
      if (it == sums.end()) {
        gaps.push_back(slots[t]);
        continue;
      }
      if (!(it->second > 0.0)) {
        throw DataError("nonpositive aggregate " + csv::format(it->second) + " for cell " + std::to_string(cell_ids[i]) +
                        " at slot " + std::to_string(slots[t]));
      }
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = it->second;
    }
    if (gaps.size() == slots.size()) throw DataError("selected cell " + std::to_string(cell_ids[i]) + " has no records");
    if (!gaps.empty()) {
      std::string list;
      for (std::size_t g = 0; g < std::min<std::size_t>(gaps.size(), 5); ++g) list += (g ? ", " : "") + std::to_string(gaps[g]);
      if (gaps.size() > 5) list += ", ...";
      throw DataError("cell " + std::to_string(cell_ids[i]) + " is missing " + std::to_string(gaps.size()) +
                      " slot(s): " + list);
    }
  }

  IngestResult out{Trace(std::move(values)), GridSpec{}, std::move(slots)};
  if (labels_from) {
    if (labels_from->grid.rows() != o.rows || labels_from->grid.cols() != o.cols) {
      throw DataError("grid spec dimensions do not match the selected subgrid");
    }
    out.spec = *labels_from;
  } else {
    out.spec.grid = SpatialGrid::queen(o.rows, o.cols);
    out.spec.labels = StaticLabels(n);
  }
  out.spec.cell_ids = std::move(cell_ids);
  return out;
}

IngestResult ingest_file(const std::filesystem::path& raw_csv, const IngestOptions& options,
                         const std::optional<std::filesystem::path>& grid_json) {
  std::optional<GridSpec> spec;
  if (grid_json) spec = load_grid_json(*grid_json);
  return ingest(csv::read_file(raw_csv), options, spec);
}

}  // namespace strelcast
