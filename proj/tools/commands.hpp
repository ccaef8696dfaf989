#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ddsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

namespace fs = std::filesystem;

struct SynthArgs {
  fs::path spec;
  fs::path out;
  std::uint64_t seed = 0;
};

struct IngestArgs {
  fs::path raw_dir;
  fs::path map;
  fs::path out;
  std::string week_start = "monday";
  double split_ratio = 0.7;
  std::uint64_t seed = 0;
};

struct TrainArgs {
  fs::path data;
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool skip_dd = false;
  std::optional<fs::path> log;
};

struct DisaggregateArgs {
  fs::path model;
  fs::path aggregate;
  std::string mode = "ddsc";
  fs::path out;
};

struct EvaluateArgs {
  fs::path model;
  fs::path data;
  fs::path out;
};

struct GridsearchArgs {
  fs::path data;
  fs::path grid;
  fs::path out;
  std::optional<std::uint64_t> seed;
};

struct ReportArgs {
  fs::path predictions;
  std::optional<fs::path> truth;
  fs::path out;
};

int cmd_synth(const SynthArgs& args, std::ostream& err);
int cmd_ingest(const IngestArgs& args, std::ostream& err);
int cmd_train(const TrainArgs& args, std::ostream& err);
int cmd_disaggregate(const DisaggregateArgs& args, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& err);
int cmd_gridsearch(const GridsearchArgs& args, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: run({"ddsc", "train", ...}).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddsc::cli
