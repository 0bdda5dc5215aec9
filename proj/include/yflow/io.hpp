#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "yflow/flow.hpp"

namespace yflow {

/// Binary field snapshot: "YFLO", u32 version, u32 n, n x u32 sizes,
/// n x f64 lengths, then row-major f64 values. Little-endian throughout.
void save_snapshot(const std::filesystem::path& path, const ScalarField& field);
ScalarField load_snapshot(const std::filesystem::path& path);
/// Loads a snapshot and checks that it lives on `grid`.
ScalarField load_snapshot(const std::filesystem::path& path, const GridPtr& grid);

/// Run cursor as a pair of files: `<stem>.yflo` holds u and `<stem>.yfls` the
/// scalar bookkeeping and the records so far, in the same encoding.
void save_checkpoint(const std::filesystem::path& stem, const RunCursor& cursor, const std::vector<double>& orders);
RunCursor load_checkpoint(const std::filesystem::path& stem, const GridPtr& grid);

/// Header names of the trajectory CSV for the given orders.
std::vector<std::string> csv_columns(const std::vector<double>& orders);
void write_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Records and orders from a CSV written by write_csv; other fields default.
Trajectory read_csv(const std::filesystem::path& path, int dimension);

}  // namespace yflow
