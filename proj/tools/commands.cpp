#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddsc/bundle.hpp"
#include "ddsc/dataio.hpp"
#include "ddsc/ddsc.hpp"
#include "ddsc/disaggregation.hpp"
#include "ddsc/serialization.hpp"
#include "ddsc/synth.hpp"

namespace ddsc::cli {

using nlohmann::json;

namespace {

int fail(std::ostream& err, int code, const std::string& what) {
  err << "ddsc: " << what << '\n';
  return code;
}

SplitPart require_split(const DatasetBundle& bundle, bool train) {
  const auto& part = train ? bundle.train : bundle.test;
  if (!part) throw Error(ErrorCode::EmptyInput, std::string("bundle has no ") + (train ? "train" : "test") + " split");
  return *part;
}

std::vector<std::string> house_of_columns(const SplitPart& part) {
  if (!part.column_houses.empty()) return part.column_houses;
  std::vector<std::string> ids;
  for (Eigen::Index c = 0; c < part.data.examples(); ++c) ids.push_back("column_" + std::to_string(c));
  return ids;
}

}  // namespace

int cmd_synth(const SynthArgs& args, std::ostream& err) {
  try {
    const auto spec = synth::spec_from_json(read_text_file(args.spec));
    write_bundle(args.out, synth::generate_bundle(spec, args.seed));
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, kExitUsage, e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
}

int cmd_ingest(const IngestArgs& args, std::ostream& err) {
  try {
    const auto map = category_map_from_json(read_text_file(args.map));
    BuildOptions options;
    options.week_start = weekday_from_string(args.week_start);
    options.split_ratio = args.split_ratio;
    options.seed = args.seed;
    auto split = build_dataset(read_raw_directory(args.raw_dir), map, options);
    DatasetBundle bundle;
    bundle.labels = map.categories;
    bundle.interval_seconds = options.interval_seconds;
    bundle.train = std::move(split.train);
    bundle.test = std::move(split.test);
    write_bundle(args.out, bundle);
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
}

int cmd_train(const TrainArgs& args, std::ostream& err) {
  std::optional<SplitPart> train;
  ConfigFile config;
  try {
    train = require_split(read_bundle(args.data), true);
    if (args.config) config = load_config(*args.config);
    if (args.seed) config.config.seed = *args.seed;
    config.config.validate();
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
  if (config.window && *config.window != train->data.window()) {
    return fail(err, kExitNumerical,
                "config T=" + std::to_string(*config.window) + " but data has T=" +
                    std::to_string(train->data.window()));
  }

  std::ofstream log;
  if (args.log) {
    if (args.log->has_parent_path()) fs::create_directories(args.log->parent_path());
    log.open(*args.log, std::ios::binary);
    if (!log) return fail(err, kExitUsage, "cannot write log " + args.log->string());
  }
  FitObservers observers;
  if (log.is_open()) {
    observers.nnsc = [&](const NnscLogRecord& r) { log << to_jsonl(r) << '\n'; };
    observers.dd = [&](const DdIterationRecord& r) { log << to_jsonl(r) << '\n'; };
  }
  try {
    const auto model = fit_model(train->data, config.config, args.skip_dd, observers);
    save_model(args.out, model);
  } catch (const std::exception& e) {
    return fail(err, kExitNumerical, std::string("training failed: ") + e.what());
  }
  return kExitOk;
}

int cmd_disaggregate(const DisaggregateArgs& args, std::ostream& err) {
  try {
    const auto model = load_model(args.model);
    const auto mode = predict_mode_from_string(args.mode);
    const UsageMatrix aggregate(read_matrix_csv(args.aggregate));
    std::vector<UsageMatrix> predictions;
    try {
      predictions = predict(aggregate, model, mode);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::WindowLengthMismatch) throw;
      return fail(err, kExitNumerical, e.what());
    }
    fs::create_directories(args.out);
    for (std::size_t k = 0; k < model.k(); ++k) {
      write_matrix_csv(args.out / (model.labels()[k] + ".csv"), predictions[k].values());
    }
    const json manifest{{"labels", model.labels()}, {"mode", to_string(mode)}};
    write_text_file(args.out / "predictions.json", manifest.dump(2) + "\n");
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& err) {
  try {
    const auto model = load_model(args.model);
    const auto test = require_split(read_bundle(args.data), false);
    MetricsReport nnsc;
    MetricsReport ddsc;
    try {
      nnsc = evaluate(test.data, model, PredictMode::NNSC);
      ddsc = evaluate(test.data, model, PredictMode::DDSC);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::WindowLengthMismatch || e.code() == ErrorCode::ShapeMismatch) throw;
      return fail(err, kExitNumerical, e.what());
    }
    fs::create_directories(args.out);
    write_text_file(args.out / "report.json", report_to_json(nnsc, ddsc));
    write_text_file(args.out / "table1.csv", report_to_csv(nnsc, ddsc));
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
}

namespace {

struct GridRow {
  TrainConfig config;
  double mae_ddsc = 0.0;
  double mae_nnsc = 0.0;
  std::optional<double> sae_ddsc;
};

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

}  // namespace

int cmd_gridsearch(const GridsearchArgs& args, std::ostream& err) {
  std::vector<TrainConfig> candidates;
  std::optional<SplitPart> train;
  double validation_ratio = 0.7;
  try {
    train = require_split(read_bundle(args.data), true);
    const json grid = json::parse(read_text_file(args.grid));
    TrainConfig base;
    if (grid.contains("base")) base = config_from_json(grid["base"].dump()).config;
    if (args.seed) base.seed = *args.seed;
    validation_ratio = grid.value("validation_ratio", validation_ratio);
    auto values = [&](const char* key) {
      if (!grid.contains(key)) throw Error(ErrorCode::InvalidConfig, std::string("grid is missing '") + key + "'");
      auto v = grid[key].get<std::vector<double>>();
      if (v.empty()) throw Error(ErrorCode::InvalidConfig, std::string("grid '") + key + "' is empty");
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    };
    const auto ns = values("n_bases");
    const auto lambdas = values("lambda");
    const auto alphas = values("alpha");
    for (double n : ns) {
      for (double l : lambdas) {
        for (double a : alphas) {
          TrainConfig c = base;
          c.n_bases = static_cast<int>(n);
          c.lambda = l;
          c.alpha = a;
          c.validate();
          candidates.push_back(c);
        }
      }
    }
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }

  std::vector<GridRow> rows;
  try {
    // Validation houses are carved from the training houses only.
    const auto column_houses = house_of_columns(*train);
    std::vector<std::string> distinct(column_houses.begin(), column_houses.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw Error(ErrorCode::InsufficientHouses, "need >= 2 training houses for validation");
    const auto [fit_idx, val_idx] = split_houses(distinct.size(), validation_ratio, candidates.front().seed);
    std::set<std::string> fit_houses;
    for (auto i : fit_idx) fit_houses.insert(distinct[i]);
    std::vector<Eigen::Index> fit_cols;
    std::vector<Eigen::Index> val_cols;
    for (std::size_t c = 0; c < column_houses.size(); ++c) {
      (fit_houses.contains(column_houses[c]) ? fit_cols : val_cols).push_back(static_cast<Eigen::Index>(c));
    }
    const auto fit_data = train->data.select_columns(fit_cols);
    const auto val_data = train->data.select_columns(val_cols);
    for (const auto& c : candidates) {
      const auto model = fit_model(fit_data, c);
      const auto d = evaluate(val_data, model, PredictMode::DDSC);
      const auto n = evaluate(val_data, model, PredictMode::NNSC);
      rows.push_back({c, d.overall.mae, n.overall.mae, d.overall.sae});
    }
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::InsufficientHouses || e.code() == ErrorCode::InvalidConfig;
    return fail(err, usage ? kExitUsage : kExitNumerical, e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitNumerical, e.what());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mae_ddsc < rows[best].mae_ddsc) best = i;
  }
  try {
    std::ostringstream table;
    table << "n_bases,lambda,alpha,mae_ddsc,mae_nnsc,sae_ddsc,best\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      table << r.config.n_bases << ',' << format_double(r.config.lambda) << ',' << format_double(r.config.alpha)
            << ',' << format_double(r.mae_ddsc) << ',' << format_double(r.mae_nnsc) << ','
            << optional_text(r.sae_ddsc) << ',' << (i == best ? 1 : 0) << '\n';
    }
    fs::create_directories(args.out);
    write_text_file(args.out / "scores.csv", table.str());
    write_text_file(args.out / "best_config.json", config_to_json(rows[best].config));
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
  return kExitOk;
}

namespace {

std::vector<std::string> prediction_labels(const fs::path& dir) {
  if (fs::exists(dir / "predictions.json")) {
    return json::parse(read_text_file(dir / "predictions.json")).at("labels").get<std::vector<std::string>>();
  }
  std::vector<std::string> labels;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv") labels.push_back(entry.path().stem().string());
    }
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace

int cmd_report(const ReportArgs& args, std::ostream& err) {
  try {
    const auto labels = prediction_labels(args.predictions);
    if (labels.empty()) return fail(err, kExitUsage, "no predictions in " + args.predictions.string());
    std::vector<Matrix> pred;
    std::vector<Matrix> truth;
    for (const auto& label : labels) {
      pred.push_back(read_matrix_csv(args.predictions / (label + ".csv")));
      if (args.truth) {
        truth.push_back(read_matrix_csv(*args.truth / (label + ".csv")));
        if (truth.back().rows() != pred.back().rows() || truth.back().cols() != pred.back().cols()) {
          return fail(err, kExitUsage, "truth and prediction shapes differ for " + label);
        }
      }
      if (pred.back().rows() != pred.front().rows() || pred.back().cols() != pred.front().cols()) {
        return fail(err, kExitUsage, "prediction files disagree on shape");
      }
    }
    const bool with_truth = args.truth.has_value();
    const Eigen::Index T = pred.front().rows();
    const Eigen::Index M = pred.front().cols();

    std::ostringstream profiles;
    profiles << "column,hour,appliance,predicted_kwh" << (with_truth ? ",truth_kwh,abs_error_kwh" : "") << '\n';
    for (Eigen::Index m = 0; m < M; ++m) {
      for (std::size_t k = 0; k < labels.size(); ++k) {
        for (Eigen::Index t = 0; t < T; ++t) {
          profiles << m << ',' << t << ',' << labels[k] << ',' << format_double(pred[k](t, m));
          if (with_truth) {
            profiles << ',' << format_double(truth[k](t, m)) << ','
                     << format_double(std::abs(pred[k](t, m) - truth[k](t, m)));
          }
          profiles << '\n';
        }
      }
    }

    std::ostringstream shares;
    shares << "column,appliance,predicted_kwh,predicted_share_pct" << (with_truth ? ",truth_kwh,truth_share_pct" : "")
           << '\n';
    auto pct = [](double part, double total) { return total > 0.0 ? 100.0 * part / total : 0.0; };
    for (Eigen::Index m = 0; m < M; ++m) {
      double pred_total = 0.0;
      double truth_total = 0.0;
      for (std::size_t k = 0; k < labels.size(); ++k) {
        pred_total += pred[k].col(m).sum();
        if (with_truth) truth_total += truth[k].col(m).sum();
      }
      for (std::size_t k = 0; k < labels.size(); ++k) {
        const double p = pred[k].col(m).sum();
        shares << m << ',' << labels[k] << ',' << format_double(p) << ',' << format_double(pct(p, pred_total));
        if (with_truth) {
          const double t = truth[k].col(m).sum();
          shares << ',' << format_double(t) << ',' << format_double(pct(t, truth_total));
        }
        shares << '\n';
      }
    }
    fs::create_directories(args.out);
    write_text_file(args.out / "profiles.csv", profiles.str());
    write_text_file(args.out / "shares.csv", shares.str());
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(err, kExitUsage, e.what());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discriminative disaggregation sparse coding toolkit", "ddsc"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset bundle");
  synth->add_option("--spec", synth_args.spec, "Profile spec JSON")->required();
  synth->add_option("--out", synth_args.out, "Output bundle directory")->required();
  synth->add_option("--seed", synth_args.seed, "RNG seed");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Build a dataset bundle from raw meter CSVs");
  ingest->add_option("--raw", ingest_args.raw_dir, "Directory of <house>.csv + <house>.meta.json")->required();
  ingest->add_option("--map", ingest_args.map, "Category map JSON")->required();
  ingest->add_option("--out", ingest_args.out, "Output bundle directory")->required();
  ingest->add_option("--week-start", ingest_args.week_start, "Weekday that starts each window");
  ingest->add_option("--split", ingest_args.split_ratio, "Fraction of houses used for training");
  ingest->add_option("--seed", ingest_args.seed, "RNG seed for the house split");

  TrainArgs train_args;
  std::uint64_t train_seed = 0;
  std::string train_config;
  std::string train_log;
  auto* train = app.add_subcommand("train", "Train NNSC + discriminative bases");
  train->add_option("--data", train_args.data, "Dataset bundle directory")->required();
  auto* config_opt = train->add_option("--config", train_config, "Training config JSON");
  train->add_option("--out", train_args.out, "Output model file")->required();
  auto* train_seed_opt = train->add_option("--seed", train_seed, "Overrides the config seed");
  train->add_flag("--skip-dd", train_args.skip_dd, "Skip discriminative training (NNSC baseline)");
  auto* log_opt = train->add_option("--log", train_log, "JSON-lines training log");

  DisaggregateArgs dis_args;
  auto* dis = app.add_subcommand("disaggregate", "Split an aggregate matrix into appliance estimates");
  dis->add_option("--model", dis_args.model, "Model file")->required();
  dis->add_option("--aggregate", dis_args.aggregate, "Aggregate matrix CSV (T rows)")->required();
  dis->add_option("--mode", dis_args.mode, "nnsc or ddsc")->check(CLI::IsMember({"nnsc", "ddsc"}));
  dis->add_option("--out", dis_args.out, "Output directory")->required();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Score NNSC and DDSC predictions on the test split");
  eval->add_option("--model", eval_args.model, "Model file")->required();
  eval->add_option("--data", eval_args.data, "Dataset bundle directory")->required();
  eval->add_option("--out", eval_args.out, "Report directory")->required();

  GridsearchArgs grid_args;
  std::uint64_t grid_seed = 0;
  auto* grid = app.add_subcommand("gridsearch", "Select n_bases, lambda and alpha on a validation split");
  grid->add_option("--data", grid_args.data, "Dataset bundle directory")->required();
  grid->add_option("--grid", grid_args.grid, "Grid JSON")->required();
  grid->add_option("--out", grid_args.out, "Output directory")->required();
  auto* grid_seed_opt = grid->add_option("--seed", grid_seed, "Overrides the base config seed");

  ReportArgs report_args;
  std::string truth_dir;
  auto* report = app.add_subcommand("report", "Emit plot-ready weekly profiles and energy shares");
  report->add_option("--predictions", report_args.predictions, "Directory written by disaggregate")->required();
  auto* truth_opt = report->add_option("--truth", truth_dir, "Directory of truth <label>.csv files");
  report->add_option("--out", report_args.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (*synth) return cmd_synth(synth_args, err);
  if (*ingest) return cmd_ingest(ingest_args, err);
  if (*train) {
    if (*config_opt) train_args.config = train_config;
    if (*train_seed_opt) train_args.seed = train_seed;
    if (*log_opt) train_args.log = train_log;
    return cmd_train(train_args, err);
  }
  if (*dis) return cmd_disaggregate(dis_args, err);
  if (*eval) return cmd_evaluate(eval_args, err);
  if (*grid) {
    if (*grid_seed_opt) grid_args.seed = grid_seed;
    return cmd_gridsearch(grid_args, err);
  }
  if (*report) {
    if (*truth_opt) report_args.truth = truth_dir;
    return cmd_report(report_args, err);
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ddsc::cli
