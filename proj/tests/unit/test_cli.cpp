#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "ddsc/bundle.hpp"
#include "ddsc/serialization.hpp"
#include "support.hpp"

using namespace ddsc;
namespace fs = std::filesystem;

namespace {

struct Cli {
  std::ostringstream out;
  std::ostringstream err;
  int operator()(std::vector<std::string> args) {
    args.insert(args.begin(), "ddsc");
    return cli::run(args, out, err);
  }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

/// Small synthetic bundle plus a quick config, shared by the CLI tests.
struct Workspace {
  test::TempDir dir{"cli"};
  fs::path bundle = dir / "bundle";
  fs::path config = dir / "config.json";
  fs::path model = dir / "model.json";

  Workspace() {
    write_text_file(dir / "spec.json", R"({"houses": 6, "window_hours": 24})");
    write_text_file(config, R"({"n_bases": 4, "lambda": 0.05, "alpha": 0.001, "nnsc_max_iters": 10,
                                "dd_max_iters": 5, "solver_max_iters": 200, "tol": 1e-6})");
    Cli cli;
    REQUIRE(cli({"synth", "--spec", (dir / "spec.json").string(), "--out", bundle.string(), "--seed", "3"}) == 0);
    REQUIRE(cli({"train", "--data", bundle.string(), "--config", config.string(), "--out", model.string()}) == 0);
  }
};

}  // namespace

TEST_CASE("synth writes identical bundles for identical seeds") {
  test::TempDir dir("synth");
  write_text_file(dir / "s.json", R"({"houses": 4, "window_hours": 24})");
  Cli cli;
  CHECK(cli({"synth", "--spec", (dir / "s.json").string(), "--out", (dir / "a").string(), "--seed", "7"}) == 0);
  CHECK(cli({"synth", "--spec", (dir / "s.json").string(), "--out", (dir / "b").string(), "--seed", "7"}) == 0);
  for (const auto* f : {"index.json", "train/aggregate.csv", "test/air.csv"}) {
    CHECK(read_text_file(dir / "a" / f) == read_text_file(dir / "b" / f));
  }
  write_text_file(dir / "bad.json", R"({"houses": )");
  Cli bad;
  CHECK(bad({"synth", "--spec", (dir / "bad.json").string(), "--out", (dir / "c").string()}) == cli::kExitUsage);
  CHECK_FALSE(bad.err.str().empty());
}

TEST_CASE("usage errors exit 2") {
  Cli cli;
  CHECK(cli({}) == cli::kExitUsage);
  CHECK(cli({"train"}) == cli::kExitUsage);
  CHECK(cli({"frobnicate"}) == cli::kExitUsage);
  CHECK(cli({"train", "--data", "/nonexistent", "--out", "/tmp/x.json"}) == cli::kExitUsage);
}

TEST_CASE("train, disaggregate, evaluate, report") {
  Workspace ws;
  const auto model = load_model(ws.model);
  CHECK(model.k() == 5);
  CHECK(model.labels() == std::vector<std::string>{"air", "furnace", "dishwasher", "refrigerator", "other"});
  CHECK(model.window() == 24);

  SUBCASE("skip-dd keeps reconstruction bases and logs are json lines") {
    Cli cli;
    const auto skip = ws.dir / "skip.json";
    const auto log = ws.dir / "logs" / "train.jsonl";
    CHECK(cli({"train", "--data", ws.bundle.string(), "--config", ws.config.string(), "--out", skip.string(),
               "--skip-dd", "--log", log.string()}) == 0);
    const auto m = load_model(skip);
    for (std::size_t k = 0; k < m.k(); ++k) {
      CHECK(test::bit_equal(m.recon_bases()[k].values(), m.disc_bases()[k].values()));
    }
    const auto records = lines(read_text_file(log));
    CHECK(!records.empty());
    for (const auto& r : records) CHECK(nlohmann::json::parse(r)["stage"] == "nnsc");
  }

  SUBCASE("a config window that disagrees with the data exits 3") {
    write_text_file(ws.dir / "wrong.json", R"({"n_bases": 2, "T": 168})");
    Cli cli;
    CHECK(cli({"train", "--data", ws.bundle.string(), "--config", (ws.dir / "wrong.json").string(), "--out",
               (ws.dir / "w.json").string()}) == cli::kExitNumerical);
    CHECK(cli.err.str().find("T=168") != std::string::npos);
  }

  SUBCASE("disaggregate writes one matrix per appliance") {
    Cli cli;
    const auto agg = ws.bundle / "test" / "aggregate.csv";
    CHECK(cli({"disaggregate", "--model", ws.model.string(), "--aggregate", agg.string(), "--mode", "ddsc", "--out",
               (ws.dir / "pd").string()}) == 0);
    CHECK(cli({"disaggregate", "--model", ws.model.string(), "--aggregate", agg.string(), "--mode", "nnsc", "--out",
               (ws.dir / "pn").string()}) == 0);
    const Matrix a = read_matrix_csv(agg);
    bool any_difference = false;
    for (const auto& label : model.labels()) {
      const Matrix d = read_matrix_csv(ws.dir / "pd" / (label + ".csv"));
      CHECK(d.rows() == a.rows());
      CHECK(d.cols() == a.cols());
      any_difference |= read_text_file(ws.dir / "pd" / (label + ".csv")) !=
                        read_text_file(ws.dir / "pn" / (label + ".csv"));
    }
    CHECK(any_difference);
    const auto manifest = nlohmann::json::parse(read_text_file(ws.dir / "pd" / "predictions.json"));
    CHECK(manifest["mode"] == "ddsc");

    write_matrix_csv(ws.dir / "zero.csv", Matrix::Zero(24, 2));
    CHECK(cli({"disaggregate", "--model", ws.model.string(), "--aggregate", (ws.dir / "zero.csv").string(), "--out",
               (ws.dir / "pz").string()}) == 0);
    for (const auto& label : model.labels()) CHECK(read_matrix_csv(ws.dir / "pz" / (label + ".csv")).isZero(0.0));

    write_matrix_csv(ws.dir / "short.csv", Matrix::Zero(5, 2));
    CHECK(cli({"disaggregate", "--model", ws.model.string(), "--aggregate", (ws.dir / "short.csv").string(), "--out",
               (ws.dir / "ps").string()}) == cli::kExitUsage);

    SUBCASE("report with and without truth") {
      Cli r;
      CHECK(r({"report", "--predictions", (ws.dir / "pd").string(), "--truth", (ws.bundle / "test").string(), "--out",
               (ws.dir / "rt").string()}) == 0);
      const auto profiles = lines(read_text_file(ws.dir / "rt" / "profiles.csv"));
      CHECK(profiles.front() == "column,hour,appliance,predicted_kwh,truth_kwh,abs_error_kwh");
      CHECK(profiles.size() == 1 + static_cast<std::size_t>(a.cols()) * 5 * 24);
      const auto shares = lines(read_text_file(ws.dir / "rt" / "shares.csv"));
      std::vector<double> pred_pct(static_cast<std::size_t>(a.cols()), 0.0);
      std::vector<double> truth_pct(static_cast<std::size_t>(a.cols()), 0.0);
      for (std::size_t i = 1; i < shares.size(); ++i) {
        std::vector<std::string> f;
        std::istringstream in(shares[i]);
        for (std::string s; std::getline(in, s, ',');) f.push_back(s);
        REQUIRE(f.size() == 6);
        pred_pct[std::stoul(f[0])] += std::stod(f[3]);
        truth_pct[std::stoul(f[0])] += std::stod(f[5]);
      }
      for (double p : pred_pct) CHECK(std::abs(p - 100.0) <= 0.1);
      for (double p : truth_pct) CHECK(std::abs(p - 100.0) <= 0.1);

      CHECK(r({"report", "--predictions", (ws.dir / "pd").string(), "--out", (ws.dir / "rn").string()}) == 0);
      CHECK(lines(read_text_file(ws.dir / "rn" / "profiles.csv")).front() == "column,hour,appliance,predicted_kwh");

      fs::create_directories(ws.dir / "nothing");
      CHECK(r({"report", "--predictions", (ws.dir / "nothing").string(), "--out", (ws.dir / "re").string()}) ==
            cli::kExitUsage);
    }
  }

  SUBCASE("evaluate writes the comparison table") {
    Cli cli;
    CHECK(cli({"evaluate", "--model", ws.model.string(), "--data", ws.bundle.string(), "--out",
               (ws.dir / "eval").string()}) == 0);
    const auto table = lines(read_text_file(ws.dir / "eval" / "table1.csv"));
    REQUIRE(table.size() == 7);
    CHECK(table[0] == "appliance,mae_nnsc,mae_ddsc,sae_nnsc,sae_ddsc,nde_nnsc,nde_ddsc");
    const std::vector<std::string> rows{"air", "furnace", "dishwasher", "refrigerator", "other", "overall"};
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(table[i + 1].rfind(rows[i] + ",", 0) == 0);
    const auto report = nlohmann::json::parse(read_text_file(ws.dir / "eval" / "report.json"));
    CHECK(report["nnsc"]["mode"] == "nnsc");
    CHECK(report["ddsc"]["per_appliance"].size() == 5);
  }

  SUBCASE("gridsearch") {
    Cli cli;
    write_text_file(ws.dir / "one.json",
                    R"({"n_bases": [3], "lambda": [0.05], "alpha": [0.001],
                        "base": {"nnsc_max_iters": 5, "dd_max_iters": 3}})");
    CHECK(cli({"gridsearch", "--data", ws.bundle.string(), "--grid", (ws.dir / "one.json").string(), "--out",
               (ws.dir / "g1").string()}) == 0);
    const auto best = config_from_json(read_text_file(ws.dir / "g1" / "best_config.json")).config;
    CHECK(best.n_bases == 3);
    CHECK(best.lambda == 0.05);
    CHECK(best.nnsc_max_iters == 5);

    write_text_file(ws.dir / "four.json",
                    R"({"n_bases": [2, 3], "lambda": [0.05, 0.1], "alpha": [0.001],
                        "base": {"nnsc_max_iters": 5, "dd_max_iters": 3}})");
    CHECK(cli({"gridsearch", "--data", ws.bundle.string(), "--grid", (ws.dir / "four.json").string(), "--out",
               (ws.dir / "g4").string()}) == 0);
    const auto scores = lines(read_text_file(ws.dir / "g4" / "scores.csv"));
    REQUIRE(scores.size() == 5);
    CHECK(scores[0] == "n_bases,lambda,alpha,mae_ddsc,mae_nnsc,sae_ddsc,best");
    int marked = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) marked += scores[i].back() == '1';
    CHECK(marked == 1);

    write_text_file(ws.dir / "empty.json", R"({"n_bases": [], "lambda": [0.1], "alpha": [0.001]})");
    CHECK(cli({"gridsearch", "--data", ws.bundle.string(), "--grid", (ws.dir / "empty.json").string(), "--out",
               (ws.dir / "ge").string()}) == cli::kExitUsage);
  }
}
