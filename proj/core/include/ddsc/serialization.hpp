#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ddsc/ddsc.hpp"
#include "ddsc/disaggregation.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

inline constexpr const char* kModelFormat = "ddsc-model/1";

/// JSON document {version, labels, T, n, config, recon_bases, disc_bases};
/// matrices are row-major nested arrays.
std::string model_to_json(const DisaggModel& model);
DisaggModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const DisaggModel& model);
DisaggModel load_model(const std::filesystem::path& path);

std::string config_to_json(const TrainConfig& config);

struct ConfigFile {
  TrainConfig config;
  /// Optional "T" entry: expected window length of the data.
  std::optional<Eigen::Index> window;
};

/// Fields absent from the document keep their documented defaults.
ConfigFile config_from_json(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

std::string report_to_json(const MetricsReport& nnsc, const MetricsReport& ddsc);

/// appliance,mae_nnsc,mae_ddsc,sae_nnsc,sae_ddsc,nde_nnsc,nde_ddsc with one
/// row per appliance and a final "overall" row. Undefined values are
/// written as "undefined".
std::string report_to_csv(const MetricsReport& nnsc, const MetricsReport& ddsc);

std::string to_jsonl(const DdIterationRecord& record);
std::string to_jsonl(const NnscLogRecord& record);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ddsc
