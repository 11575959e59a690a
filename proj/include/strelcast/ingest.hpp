#pragma once

#include "strelcast/spatial.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strelcast {

/// Where the selected subgrid sits inside the source grid. Source cell ids map to
/// (row, col) = ((id - id_base) / source_cols, (id - id_base) % source_cols).
struct IngestOptions {
  int source_cols = 1;
  std::int64_t id_base = 0;
  int row0 = 0;
  int col0 = 0;
  int rows = 1;
  int cols = 1;
};

struct IngestResult {
  Trace trace;
  GridSpec spec;
  /// Original time-slot stamps, one per trace column.
  std::vector<std::int64_t> slots;
};

/**
 * Aggregates raw activity records into one crowdedness value per cell and slot.
 *
 * Input rows are `cell_id,time_slot,activity_1[,activity_2,...]` with an optional header.
 * Every activity column and every repeated (cell, slot) row is summed; empty fields count
 * as zero. Slots must form a regular grid (step = smallest gap) with no holes for any
 * selected cell. Cells outside the selection are ignored.
 *
 * Throws DataError naming the offending cell/slot on nonpositive aggregates, missing
 * slots, selected cells absent from the data, and malformed rows.
 */
IngestResult ingest(const std::string& raw_csv, const IngestOptions& options,
                    const std::optional<GridSpec>& labels_from = std::nullopt);

IngestResult ingest_file(const std::filesystem::path& raw_csv, const IngestOptions& options,
                         const std::optional<std::filesystem::path>& grid_json = std::nullopt);

}  // namespace strelcast
