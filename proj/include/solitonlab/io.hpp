#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "solitonlab/model.hpp"
#include "solitonlab/pde.hpp"

namespace solitonlab {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

// Identifies the configuration that produced an output file.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::string version{kArtifactVersion};
};

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Shortest rendering that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void add_numeric_row(const std::vector<double>& row);
};

// First line is '# solitonlab <version> config_hash=<hex>'.
std::string render_csv(const CsvTable& table, const Provenance& prov);
void write_csv(const std::filesystem::path& path, const CsvTable& table, const Provenance& prov);

// Binary snapshot layout (little endian):
//   char[8] magic "SLSNAP\0\1", uint32 version, uint32 reserved,
//   uint64 n, f64 x_min, f64 x_max, f64 t, uint64 config_hash, f64 u[n].
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  Grid1D grid;
  SimState state;
  std::uint64_t config_hash = 0;
};

std::string encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(std::string_view bytes);
void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);
std::string snapshot_filename(std::size_t index);
// Snapshots of a directory in file name order.
std::vector<Snapshot> read_snapshot_directory(const std::filesystem::path& dir);

}  // namespace solitonlab
