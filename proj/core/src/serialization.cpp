#include "ddsc/serialization.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddsc/bundle.hpp"

namespace ddsc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
    throw Error(ErrorCode::ParseError, "matrix must be a non-empty array of rows");
  }
  const auto R = static_cast<Eigen::Index>(rows.size());
  const auto C = static_cast<Eigen::Index>(rows.front().size());
  Matrix m(R, C);
  for (Eigen::Index r = 0; r < R; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != C) {
      throw Error(ErrorCode::ParseError, "ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < C; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw Error(ErrorCode::ParseError, "matrix entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

json config_json(const TrainConfig& c) {
  return json{{"n_bases", c.n_bases},
              {"lambda", c.lambda},
              {"alpha", c.alpha},
              {"nnsc_max_iters", c.nnsc_max_iters},
              {"dd_max_iters", c.dd_max_iters},
              {"solver_max_iters", c.solver_max_iters},
              {"tol", c.tol},
              {"seed", c.seed},
              {"penalty", to_string(c.penalty_mode)}};
}

TrainConfig config_from_node(const json& node) {
  if (!node.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  TrainConfig c;
  try {
    c.n_bases = node.value("n_bases", c.n_bases);
    c.lambda = node.value("lambda", c.lambda);
    c.alpha = node.value("alpha", c.alpha);
    c.nnsc_max_iters = node.value("nnsc_max_iters", c.nnsc_max_iters);
    c.dd_max_iters = node.value("dd_max_iters", c.dd_max_iters);
    c.solver_max_iters = node.value("solver_max_iters", c.solver_max_iters);
    c.tol = node.value("tol", c.tol);
    c.seed = node.value("seed", c.seed);
    if (node.contains("penalty")) c.penalty_mode = penalty_mode_from_string(node["penalty"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json("undefined");
}

json report_json(const MetricsReport& r) {
  json rows = json::array();
  for (const auto& a : r.per_appliance) {
    rows.push_back({{"label", a.label},
                    {"mae", a.mae},
                    {"sae", optional_number(a.sae)},
                    {"nde", optional_number(a.nde)},
                    {"columns", a.columns},
                    {"sae_undefined", a.sae_undefined},
                    {"nde_undefined", a.nde_undefined}});
  }
  return json{{"mode", to_string(r.mode)},
              {"per_appliance", rows},
              {"overall",
               {{"mae", r.overall.mae}, {"sae", optional_number(r.overall.sae)}, {"nde", optional_number(r.overall.nde)}}}};
}

std::string csv_value(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

}  // namespace

std::string model_to_json(const DisaggModel& model) {
  json n = json::array();
  json recon = json::array();
  json disc = json::array();
  for (std::size_t k = 0; k < model.k(); ++k) {
    n.push_back(model.recon_bases()[k].n());
    recon.push_back(matrix_to_json(model.recon_bases()[k].values()));
    disc.push_back(matrix_to_json(model.disc_bases()[k].values()));
  }
  json doc{{"version", kModelFormat}, {"labels", model.labels()},  {"T", model.window()},
           {"n", n},                  {"config", config_json(model.config())},
           {"recon_bases", recon},    {"disc_bases", disc}};
  return doc.dump() + "\n";
}

DisaggModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
  if (doc.value("version", std::string{}) != kModelFormat) {
    throw Error(ErrorCode::ParseError, "model version must be " + std::string(kModelFormat));
  }
  try {
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    std::vector<Dictionary> recon;
    std::vector<Dictionary> disc;
    for (const auto& m : doc.at("recon_bases")) recon.emplace_back(matrix_from_json(m));
    for (const auto& m : doc.at("disc_bases")) disc.emplace_back(matrix_from_json(m));
    DisaggModel model(std::move(labels), std::move(recon), std::move(disc), config_from_node(doc.at("config")));
    if (doc.contains("T") && doc["T"].get<Eigen::Index>() != model.window()) {
      throw Error(ErrorCode::ShapeMismatch, "model T disagrees with basis rows");
    }
    if (doc.contains("n")) {
      const auto n = doc["n"].get<std::vector<Eigen::Index>>();
      if (n != block_sizes(model.recon_bases())) {
        throw Error(ErrorCode::ShapeMismatch, "model n disagrees with basis columns");
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
}

void save_model(const fs::path& path, const DisaggModel& model) { write_text_file(path, model_to_json(model)); }

DisaggModel load_model(const fs::path& path) { return model_from_json(read_text_file(path)); }

std::string config_to_json(const TrainConfig& config) { return config_json(config).dump(2) + "\n"; }

ConfigFile config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  ConfigFile out{config_from_node(doc), std::nullopt};
  if (doc.contains("T")) out.window = doc["T"].get<Eigen::Index>();
  return out;
}

ConfigFile load_config(const fs::path& path) { return config_from_json(read_text_file(path)); }

std::string report_to_json(const MetricsReport& nnsc, const MetricsReport& ddsc) {
  json doc{{"conventions",
            {{"mae", "per-column mean over timesteps, then mean over columns (house-weeks)"},
             {"sae", "per column, then mean over columns with a defined value"},
             {"overall", "unweighted mean over appliances"}}},
           {"nnsc", report_json(nnsc)},
           {"ddsc", report_json(ddsc)}};
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const MetricsReport& nnsc, const MetricsReport& ddsc) {
  if (nnsc.per_appliance.size() != ddsc.per_appliance.size()) {
    throw Error(ErrorCode::ShapeMismatch, "reports cover different appliances");
  }
  std::ostringstream out;
  out << "appliance,mae_nnsc,mae_ddsc,sae_nnsc,sae_ddsc,nde_nnsc,nde_ddsc\n";
  for (std::size_t k = 0; k < nnsc.per_appliance.size(); ++k) {
    const auto& a = nnsc.per_appliance[k];
    const auto& b = ddsc.per_appliance[k];
    out << a.label << ',' << format_double(a.mae) << ',' << format_double(b.mae) << ',' << csv_value(a.sae) << ','
        << csv_value(b.sae) << ',' << csv_value(a.nde) << ',' << csv_value(b.nde) << '\n';
  }
  out << "overall," << format_double(nnsc.overall.mae) << ',' << format_double(ddsc.overall.mae) << ','
      << csv_value(nnsc.overall.sae) << ',' << csv_value(ddsc.overall.sae) << ',' << csv_value(nnsc.overall.nde)
      << ',' << csv_value(ddsc.overall.nde) << '\n';
  return out.str();
}

std::string to_jsonl(const DdIterationRecord& r) {
  return json{{"stage", "dd"},
              {"iteration", r.iteration},
              {"error_recon", r.error_recon},
              {"error_disc", r.error_disc},
              {"update_norm", r.update_norm}}
      .dump();
}

std::string to_jsonl(const NnscLogRecord& r) {
  return json{{"stage", "nnsc"}, {"appliance", r.appliance}, {"round", r.round}, {"objective", r.objective}}.dump();
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace ddsc
