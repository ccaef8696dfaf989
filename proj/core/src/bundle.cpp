#include "ddsc/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ddsc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error(ErrorCode::IoError, "number formatting failed");
  return std::string(buf, ptr);
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(p, comma, v);
      if (ec != std::errc() || ptr != comma) {
        throw Error(ErrorCode::ParseError, path.string() + ": bad number on row " + std::to_string(rows.size() + 1));
      }
      row.push_back(v);
      p = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ShapeMismatch, path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, path.string() + " is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

namespace {

json write_split(const fs::path& dir, const std::string& name, const SplitPart& part) {
  json files = json::object();
  for (std::size_t k = 0; k < part.data.k(); ++k) {
    const std::string rel = name + "/" + part.data.labels()[k] + ".csv";
    write_matrix_csv(dir / rel, part.data.components()[k].values());
    files[part.data.labels()[k]] = rel;
  }
  const std::string agg = name + "/aggregate.csv";
  write_matrix_csv(dir / agg, part.data.aggregate().values());
  return json{{"columns", part.data.examples()},
              {"houses", part.houses},
              {"column_houses", part.column_houses},
              {"column_starts", part.column_starts},
              {"components", files},
              {"aggregate", agg}};
}

SplitPart read_split(const fs::path& dir, const json& node, const std::vector<std::string>& labels,
                     std::int64_t interval) {
  std::vector<UsageMatrix> comps;
  for (const auto& label : labels) {
    const auto rel = node.at("components").at(label).get<std::string>();
    comps.emplace_back(read_matrix_csv(dir / rel), interval);
  }
  UsageMatrix agg(read_matrix_csv(dir / node.at("aggregate").get<std::string>()), interval);
  SplitPart part{make_dataset(labels, std::move(comps), std::move(agg)),
                 node.value("houses", std::vector<std::string>{}),
                 node.value("column_houses", std::vector<std::string>{}),
                 node.value("column_starts", std::vector<std::int64_t>{})};
  if (!part.column_houses.empty() &&
      static_cast<Eigen::Index>(part.column_houses.size()) != part.data.examples()) {
    throw Error(ErrorCode::ShapeMismatch, "column_houses length differs from column count");
  }
  return part;
}

}  // namespace

void write_bundle(const fs::path& dir, const DatasetBundle& bundle) {
  fs::create_directories(dir);
  json index{{"format", kDataFormat},
             {"labels", bundle.labels},
             {"interval_seconds", bundle.interval_seconds},
             {"splits", json::object()}};
  Eigen::Index window = 0;
  if (bundle.train) {
    index["splits"]["train"] = write_split(dir, "train", *bundle.train);
    window = bundle.train->data.window();
  }
  if (bundle.test) {
    index["splits"]["test"] = write_split(dir, "test", *bundle.test);
    window = bundle.test->data.window();
  }
  index["T"] = window;
  std::ofstream out(dir / "index.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "index.json").string());
  out << index.dump(2) << '\n';
}

DatasetBundle read_bundle(const fs::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw Error(ErrorCode::IoError, "no index.json in " + dir.string());
  json index;
  try {
    index = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("index.json: ") + e.what());
  }
  if (index.value("format", std::string{}) != kDataFormat) {
    throw Error(ErrorCode::ParseError, "index.json is not a " + std::string(kDataFormat) + " bundle");
  }
  DatasetBundle bundle;
  try {
    bundle.labels = index.at("labels").get<std::vector<std::string>>();
    bundle.interval_seconds = index.value("interval_seconds", std::int64_t{3600});
    const auto& splits = index.at("splits");
    if (splits.contains("train")) {
      bundle.train = read_split(dir, splits["train"], bundle.labels, bundle.interval_seconds);
    }
    if (splits.contains("test")) {
      bundle.test = read_split(dir, splits["test"], bundle.labels, bundle.interval_seconds);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("index.json: ") + e.what());
  }
  return bundle;
}

}  // namespace ddsc
