#include "ddsc/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ddsc/rng.hpp"

namespace ddsc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::int64_t kWeekSeconds = 7 * 86400;
// 1970-01-05 was a Monday.
constexpr std::int64_t kFirstMonday = 4 * 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int parse_int(std::string_view s, const std::string& context) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "bad timestamp '" + context + "'");
  }
  return v;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

EnergyUnit energy_unit_from_string(const std::string& text) {
  if (text == "kW" || text == "kw") return EnergyUnit::kW;
  if (text == "kWh" || text == "kwh") return EnergyUnit::kWh;
  throw Error(ErrorCode::UnitUndeclared, "unit must be kW or kWh, got '" + text + "'");
}

std::int64_t parse_iso8601_utc(const std::string& text) {
  // YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    throw Error(ErrorCode::ParseError, "bad timestamp '" + text + "'");
  }
  const std::string_view v(text);
  const int y = parse_int(v.substr(0, 4), text);
  const int mo = parse_int(v.substr(5, 2), text);
  const int d = parse_int(v.substr(8, 2), text);
  const int h = parse_int(v.substr(11, 2), text);
  const int mi = parse_int(v.substr(14, 2), text);
  const int s = parse_int(v.substr(17, 2), text);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  const std::string tz = text.substr(pos);
  if (!(tz == "Z" || tz == "+00:00" || tz.empty())) {
    throw Error(ErrorCode::ParseError, "timestamp must be UTC: '" + text + "'");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorCode::ParseError, "invalid date/time '" + text + "'");
  }
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const std::int64_t day_index = floor_div(epoch_seconds, 86400);
  const std::int64_t rem = epoch_seconds - day_index * 86400;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

void RawReadingsTable::validate() const {
  if (channels.empty()) throw Error(ErrorCode::EmptyInput, "house " + house_id + " has no readings");
  for (const auto& [name, series] : channels) {
    if (series.timestamps.size() != series.values.size()) {
      throw Error(ErrorCode::ParseError, "channel " + name + " has mismatched timestamps/values");
    }
    if (series.timestamps.empty()) throw Error(ErrorCode::EmptyInput, "channel " + name + " is empty");
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      if (!std::isfinite(series.values[i])) {
        throw Error(ErrorCode::NonFiniteInput, "channel " + name + " has a non-finite value");
      }
      if (series.values[i] < 0.0) {
        throw Error(ErrorCode::NegativeEntry, "channel " + name + " has a negative value");
      }
      if (i > 0 && series.timestamps[i] <= series.timestamps[i - 1]) {
        throw Error(ErrorCode::ParseError, "channel " + name + " timestamps are not strictly increasing");
      }
    }
  }
  if (reading_seconds < 0) throw Error(ErrorCode::ParseError, "reading_seconds must be non-negative");
}

RawReadingsTable read_house_csv(const fs::path& csv_path, const fs::path& meta_path) {
  RawReadingsTable table;
  table.house_id = csv_path.stem().string();

  std::ifstream meta_in(meta_path);
  if (!meta_in) throw Error(ErrorCode::UnitUndeclared, "missing sidecar " + meta_path.string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, meta_path.string() + ": " + e.what());
  }
  if (!meta.contains("unit") || !meta["unit"].is_string()) {
    throw Error(ErrorCode::UnitUndeclared, meta_path.string() + " does not declare a unit");
  }
  table.unit = energy_unit_from_string(meta["unit"].get<std::string>());
  table.reading_seconds = meta.value("reading_seconds", std::int64_t{0});

  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "timestamp,channel,value") {
    throw Error(ErrorCode::ParseError, csv_path.string() + ": header must be 'timestamp,channel,value'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorCode::ParseError, csv_path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    const auto ts = parse_iso8601_utc(line.substr(0, c1));
    const std::string channel = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string value_text = line.substr(c2 + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw Error(ErrorCode::ParseError, csv_path.string() + ":" + std::to_string(line_no) + ": bad value");
    }
    auto& series = table.channels[channel];
    series.timestamps.push_back(ts);
    series.values.push_back(value);
  }
  if (table.channels.empty()) throw Error(ErrorCode::EmptyInput, csv_path.string() + " has no readings");
  table.validate();
  return table;
}

std::vector<RawReadingsTable> read_raw_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
  }
  std::sort(csvs.begin(), csvs.end());
  std::vector<RawReadingsTable> out;
  for (const auto& csv : csvs) {
    auto meta = csv;
    meta.replace_extension(".meta.json");
    out.push_back(read_house_csv(csv, meta));
  }
  return out;
}

void write_house_csv(const RawReadingsTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / (table.house_id + ".csv"));
  if (!out) throw Error(ErrorCode::IoError, "cannot write house csv for " + table.house_id);
  out << "timestamp,channel,value\n";
  for (const auto& [name, series] : table.channels) {
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, series.values[i]);
      out << format_iso8601_utc(series.timestamps[i]) << ',' << name << ',' << std::string_view(buf, ptr - buf)
          << '\n';
    }
  }
  json meta{{"unit", table.unit == EnergyUnit::kW ? "kW" : "kWh"}};
  if (table.reading_seconds > 0) meta["reading_seconds"] = table.reading_seconds;
  std::ofstream meta_out(dir / (table.house_id + ".meta.json"));
  meta_out << meta.dump(2) << '\n';
}

ResampledHouse resample(const RawReadingsTable& raw, std::int64_t interval_seconds, double min_coverage) {
  raw.validate();
  if (interval_seconds <= 0) throw Error(ErrorCode::InvalidConfig, "interval must be positive");

  std::int64_t duration = raw.reading_seconds;
  if (duration == 0) {
    std::int64_t smallest = 0;
    for (const auto& [_, series] : raw.channels) {
      for (std::size_t i = 1; i < series.timestamps.size(); ++i) {
        const auto gap = series.timestamps[i] - series.timestamps[i - 1];
        if (smallest == 0 || gap < smallest) smallest = gap;
      }
    }
    if (smallest == 0) {
      throw Error(ErrorCode::EmptyInput,
                  "cannot infer reading duration for house " + raw.house_id + "; set reading_seconds");
    }
    duration = std::min(smallest, interval_seconds);
  }

  std::int64_t first = INT64_MAX;
  std::int64_t last = INT64_MIN;
  for (const auto& [_, series] : raw.channels) {
    first = std::min(first, floor_div(series.timestamps.front(), interval_seconds));
    last = std::max(last, floor_div(series.timestamps.back(), interval_seconds));
  }

  ResampledHouse out;
  out.house_id = raw.house_id;
  out.interval_seconds = interval_seconds;
  out.start = first * interval_seconds;
  out.length = static_cast<std::size_t>(last - first + 1);
  const double reading_hours = static_cast<double>(duration) / 3600.0;
  for (const auto& [name, series] : raw.channels) {
    std::vector<double> energy(out.length, 0.0);
    std::vector<std::int64_t> covered(out.length, 0);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      const auto bucket = static_cast<std::size_t>(floor_div(series.timestamps[i], interval_seconds) - first);
      energy[bucket] += raw.unit == EnergyUnit::kW ? series.values[i] * reading_hours : series.values[i];
      covered[bucket] += duration;
    }
    std::vector<bool> missing(out.length);
    for (std::size_t b = 0; b < out.length; ++b) {
      missing[b] = static_cast<double>(covered[b]) < min_coverage * static_cast<double>(interval_seconds);
    }
    out.energy.emplace(name, std::move(energy));
    out.missing.emplace(name, std::move(missing));
  }
  return out;
}

void CategoryMap::validate() const {
  if (categories.empty()) throw Error(ErrorCode::InvalidConfig, "category map has no categories");
  std::set<std::string> seen;
  for (const auto& c : categories) {
    if (c.empty() || c == "aggregate" || c.find('/') != std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "invalid category name '" + c + "'");
    }
    if (!seen.insert(c).second) throw Error(ErrorCode::InvalidConfig, "duplicate category '" + c + "'");
  }
  for (const auto& [channel, cat] : channel_to_category) {
    if (!seen.contains(cat)) {
      throw Error(ErrorCode::InvalidConfig, "channel " + channel + " maps to unknown category " + cat);
    }
    if (ignore.contains(channel)) {
      throw Error(ErrorCode::InvalidConfig, "channel " + channel + " is both mapped and ignored");
    }
    if (channel == aggregate_channel) {
      throw Error(ErrorCode::InvalidConfig, "aggregate channel " + channel + " cannot map to a category");
    }
  }
  if (!residual_category.empty() && !seen.contains(residual_category)) {
    throw Error(ErrorCode::InvalidConfig, "residual category " + residual_category + " is not a category");
  }
}

CategoryMap category_map_from_json(const std::string& text) {
  CategoryMap map;
  try {
    const json doc = json::parse(text);
    if (doc.contains("categories")) map.categories = doc["categories"].get<std::vector<std::string>>();
    if (doc.contains("channels")) map.channel_to_category = doc["channels"].get<std::map<std::string, std::string>>();
    if (doc.contains("ignore")) map.ignore = doc["ignore"].get<std::set<std::string>>();
    map.aggregate_channel = doc.value("aggregate", std::string{});
    map.residual_category = doc.value("residual_category", map.residual_category);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("category map: ") + e.what());
  }
  map.validate();
  return map;
}

Weekday weekday_from_string(const std::string& text) {
  static const char* names[] = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (int i = 0; i < 7; ++i) {
    if (lower == names[i] || lower == std::string(names[i]).substr(0, 3)) return static_cast<Weekday>(i);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown weekday '" + text + "'");
}

HouseWeeks house_weeks(const RawReadingsTable& raw, const CategoryMap& map, const BuildOptions& options) {
  map.validate();
  if (kWeekSeconds % options.interval_seconds != 0) {
    throw Error(ErrorCode::InvalidConfig, "interval must divide one week");
  }
  for (const auto& [name, _] : raw.channels) {
    if (name != map.aggregate_channel && !map.ignore.contains(name) && !map.channel_to_category.contains(name)) {
      throw Error(ErrorCode::InvalidConfig, "house " + raw.house_id + ": channel '" + name + "' is not mapped");
    }
  }
  const ResampledHouse hourly = resample(raw, options.interval_seconds, options.min_coverage);
  const std::size_t K = map.categories.size();
  const std::size_t L = hourly.length;

  std::vector<std::vector<double>> cat(K, std::vector<double>(L, 0.0));
  std::vector<bool> missing(L, false);
  std::map<std::string, std::size_t> cat_index;
  for (std::size_t k = 0; k < K; ++k) cat_index[map.categories[k]] = k;

  for (const auto& [name, energy] : hourly.energy) {
    auto it = map.channel_to_category.find(name);
    if (it == map.channel_to_category.end()) continue;
    const auto k = cat_index.at(it->second);
    const auto& miss = hourly.missing.at(name);
    for (std::size_t t = 0; t < L; ++t) {
      cat[k][t] += energy[t];
      if (miss[t]) missing[t] = true;
    }
  }

  std::vector<double> aggregate(L, 0.0);
  const bool has_whole_home = !map.aggregate_channel.empty() && hourly.energy.contains(map.aggregate_channel);
  for (std::size_t t = 0; t < L; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += cat[k][t];
    if (!has_whole_home) {
      aggregate[t] = sum;
      continue;
    }
    const double whole = hourly.energy.at(map.aggregate_channel)[t];
    if (hourly.missing.at(map.aggregate_channel)[t]) missing[t] = true;
    const double residual = whole - sum;
    if (map.residual_category.empty()) {
      if (std::abs(residual) > kAggregateTolerance) missing[t] = true;
      aggregate[t] = sum;
    } else if (residual < -options.residual_tolerance) {
      missing[t] = true;
      aggregate[t] = sum;
    } else {
      cat[cat_index.at(map.residual_category)][t] += std::max(residual, 0.0);
      aggregate[t] = std::max(whole, sum);
    }
  }

  const std::int64_t anchor = kFirstMonday + static_cast<std::int64_t>(options.week_start) * 86400;
  const auto T = static_cast<std::size_t>(kWeekSeconds / options.interval_seconds);
  const std::int64_t end = hourly.start + static_cast<std::int64_t>(L) * options.interval_seconds;
  std::int64_t week = anchor + (floor_div(hourly.start - anchor - 1, kWeekSeconds) + 1) * kWeekSeconds;

  HouseWeeks out;
  out.house_id = raw.house_id;
  std::vector<std::size_t> offsets;
  for (; week + kWeekSeconds <= end; week += kWeekSeconds) {
    const auto offset = static_cast<std::size_t>((week - hourly.start) / options.interval_seconds);
    bool complete = true;
    for (std::size_t t = 0; t < T && complete; ++t) complete = !missing[offset + t];
    if (!complete) continue;
    offsets.push_back(offset);
    out.week_starts.push_back(week);
  }
  const auto W = static_cast<Eigen::Index>(offsets.size());
  out.categories.assign(K, Matrix(static_cast<Eigen::Index>(T), W));
  out.aggregate = Matrix(static_cast<Eigen::Index>(T), W);
  for (Eigen::Index w = 0; w < W; ++w) {
    const std::size_t offset = offsets[static_cast<std::size_t>(w)];
    for (std::size_t t = 0; t < T; ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      for (std::size_t k = 0; k < K; ++k) out.categories[k](r, w) = cat[k][offset + t];
      out.aggregate(r, w) = aggregate[offset + t];
    }
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_houses(std::size_t houses, double ratio,
                                                                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::InvalidConfig, "split ratio must be in (0, 1)");
  std::vector<std::size_t> order(houses);
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(seed, stream_id("house-split"));
  for (std::size_t i = houses; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  // Guard against 0.7 * 10 landing just under 7.
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(houses) + 1e-9));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

SplitPart assemble_split(const std::vector<HouseWeeks>& houses, const std::vector<std::size_t>& which,
                         const std::vector<std::string>& labels, std::int64_t interval_seconds) {
  Eigen::Index columns = 0;
  Eigen::Index rows = -1;
  for (auto h : which) {
    columns += houses[h].aggregate.cols();
    if (houses[h].aggregate.cols() > 0) rows = houses[h].aggregate.rows();
  }
  if (columns == 0) throw Error(ErrorCode::NoCompleteWeeks, "split has no complete weeks");

  const std::size_t K = labels.size();
  std::vector<Matrix> comps(K, Matrix(rows, columns));
  Matrix agg(rows, columns);
  std::vector<std::string> house_ids;
  std::vector<std::string> column_houses;
  std::vector<std::int64_t> column_starts;
  Eigen::Index col = 0;
  for (auto h : which) {
    const auto& hw = houses[h];
    house_ids.push_back(hw.house_id);
    for (Eigen::Index w = 0; w < hw.aggregate.cols(); ++w, ++col) {
      for (std::size_t k = 0; k < K; ++k) comps[k].col(col) = hw.categories[k].col(w);
      agg.col(col) = hw.aggregate.col(w);
      column_houses.push_back(hw.house_id);
      column_starts.push_back(hw.week_starts[static_cast<std::size_t>(w)]);
    }
  }
  std::vector<UsageMatrix> usage;
  for (auto& c : comps) usage.emplace_back(std::move(c), interval_seconds);
  return SplitPart{make_dataset(labels, std::move(usage), UsageMatrix(std::move(agg), interval_seconds)),
                   std::move(house_ids), std::move(column_houses), std::move(column_starts)};
}

DatasetSplit build_dataset(const std::vector<RawReadingsTable>& houses, const CategoryMap& map,
                           const BuildOptions& options) {
  if (houses.size() < 2) throw Error(ErrorCode::InsufficientHouses, "need at least 2 houses");
  map.validate();
  std::vector<HouseWeeks> windows;
  windows.reserve(houses.size());
  for (const auto& h : houses) windows.push_back(house_weeks(h, map, options));

  auto [train_idx, test_idx] = split_houses(houses.size(), options.split_ratio, options.seed);
  return DatasetSplit{assemble_split(windows, train_idx, map.categories, options.interval_seconds),
                      assemble_split(windows, test_idx, map.categories, options.interval_seconds)};
}

}  // namespace ddsc
