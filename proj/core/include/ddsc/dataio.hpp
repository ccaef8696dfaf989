#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ddsc/types.hpp"

namespace ddsc {

enum class EnergyUnit { kW, kWh };

EnergyUnit energy_unit_from_string(const std::string& text);

struct ChannelSeries {
  std::vector<std::int64_t> timestamps;  // UTC epoch seconds, strictly increasing
  std::vector<double> values;            // non-negative
};

/// Raw meter readings of one house. Values are average power (kW) over each
/// reading or energy (kWh) per reading, as declared by `unit`.
struct RawReadingsTable {
  std::string house_id;
  EnergyUnit unit = EnergyUnit::kW;
  /// Duration covered by each reading; inferred from the smallest timestamp
  /// gap when zero.
  std::int64_t reading_seconds = 0;
  std::map<std::string, ChannelSeries> channels;

  /// Throws EmptyInput / ParseError / NegativeEntry on a malformed table.
  void validate() const;
};

/// "2019-01-07T00:00:00Z" (also accepts "+00:00" and fractional seconds).
std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

/// Long-format CSV `timestamp,channel,value` plus the JSON sidecar
/// (`{"unit": "kW"|"kWh", "reading_seconds": 60}`).
RawReadingsTable read_house_csv(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);

/// Every `<house_id>.csv` in `dir` with its `<house_id>.meta.json` sidecar,
/// ordered by house id.
std::vector<RawReadingsTable> read_raw_directory(const std::filesystem::path& dir);

void write_house_csv(const RawReadingsTable& table, const std::filesystem::path& dir);

/// Per-channel energy on a common interval grid.
struct ResampledHouse {
  std::string house_id;
  std::int64_t start = 0;  // start of the first interval
  std::int64_t interval_seconds = 3600;
  std::size_t length = 0;
  std::map<std::string, std::vector<double>> energy;  // kWh per interval
  std::map<std::string, std::vector<bool>> missing;   // coverage below threshold
};

inline constexpr double kMinCoverage = 0.9;

/// Sums per-reading energy into epoch-aligned intervals. Intervals whose
/// readings cover less than `min_coverage` of the interval are marked
/// missing.
ResampledHouse resample(const RawReadingsTable& raw, std::int64_t interval_seconds = 3600,
                        double min_coverage = kMinCoverage);

/// Channel-to-category assignment.
struct CategoryMap {
  std::vector<std::string> categories{"air", "furnace", "dishwasher", "refrigerator", "other"};
  std::map<std::string, std::string> channel_to_category;
  std::set<std::string> ignore;
  /// Whole-home channel; empty when absent.
  std::string aggregate_channel;
  /// Category receiving whole-home energy not covered by mapped channels.
  /// Empty disables the residual and requires exact consistency.
  std::string residual_category = "other";

  void validate() const;
};

/// {"categories": [...], "channels": {raw: category}, "ignore": [...],
///  "aggregate": "<whole-home channel>", "residual_category": "other"}
CategoryMap category_map_from_json(const std::string& text);

enum class Weekday { Monday = 0, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

Weekday weekday_from_string(const std::string& text);

struct BuildOptions {
  Weekday week_start = Weekday::Monday;
  double split_ratio = 0.7;
  std::uint64_t seed = 0;
  std::int64_t interval_seconds = 3600;
  double min_coverage = kMinCoverage;
  /// Slack for whole-home readings falling short of the mapped channels.
  double residual_tolerance = 1e-6;
};

struct HouseWeeks {
  std::string house_id;
  std::vector<std::int64_t> week_starts;
  std::vector<Matrix> categories;  // per category, T x weeks
  Matrix aggregate;                // T x weeks
};

/// Complete weeks of one house, category-summed. Weeks with any missing
/// interval are dropped.
HouseWeeks house_weeks(const RawReadingsTable& raw, const CategoryMap& map, const BuildOptions& options);

/// Indices of train and test houses: a seeded shuffle, then
/// floor(ratio * H) houses to train. Each side is returned in ascending
/// index order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_houses(std::size_t houses, double ratio,
                                                                           std::uint64_t seed);

struct SplitPart {
  ApplianceDataset data;
  std::vector<std::string> houses;          // distinct, ascending input order
  std::vector<std::string> column_houses;   // house of each column
  std::vector<std::int64_t> column_starts;  // window start per column
};

struct DatasetSplit {
  SplitPart train;
  SplitPart test;
};

/// Builds train/test datasets split by house, never by week.
DatasetSplit build_dataset(const std::vector<RawReadingsTable>& houses, const CategoryMap& map,
                           const BuildOptions& options = {});

/// Assembles one split from already-windowed houses.
SplitPart assemble_split(const std::vector<HouseWeeks>& houses, const std::vector<std::size_t>& which,
                         const std::vector<std::string>& labels, std::int64_t interval_seconds);

}  // namespace ddsc
