#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ddsc/dataio.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

inline constexpr const char* kDataFormat = "ddsc-data/1";

/// On-disk dataset: `index.json` plus one CSV per matrix
/// (`<split>/<label>.csv`, `<split>/aggregate.csv`). Matrices are written
/// T rows by M columns with shortest round-trip decimal numbers, so reading
/// a bundle back reproduces every value bit-exactly.
struct DatasetBundle {
  std::vector<std::string> labels;
  std::int64_t interval_seconds = 3600;
  std::optional<SplitPart> train;
  std::optional<SplitPart> test;
};

void write_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle);
DatasetBundle read_bundle(const std::filesystem::path& dir);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace ddsc
