#include <doctest.h>

#include <json.hpp>

#include "ddsc/serialization.hpp"
#include "support.hpp"

using namespace ddsc;
using nlohmann::json;

namespace {

DisaggModel sample_model() {
  CounterRng rng(1, 2);
  std::vector<Dictionary> recon{random_dictionary(5, 2, rng), random_dictionary(5, 3, rng)};
  std::vector<Dictionary> disc{random_dictionary(5, 2, rng), random_dictionary(5, 3, rng)};
  TrainConfig c;
  c.n_bases = 3;
  c.lambda = 0.125;
  c.seed = 99;
  c.penalty_mode = PenaltyMode::SquaredFrobenius;
  return DisaggModel({"air", "other"}, recon, disc, c);
}

}  // namespace

TEST_CASE("model json round trip is bit-exact") {
  const auto m = sample_model();
  const std::string text = model_to_json(m);
  const auto doc = json::parse(text);
  CHECK(doc["version"] == kModelFormat);
  CHECK(doc["T"] == 5);
  CHECK(doc["n"] == json::array({2, 3}));
  CHECK(doc["recon_bases"][0].size() == 5);     // rows
  CHECK(doc["recon_bases"][0][0].size() == 2);  // row-major

  const auto back = model_from_json(text);
  CHECK(back.labels() == m.labels());
  CHECK(back.config().lambda == 0.125);
  CHECK(back.config().seed == 99);
  CHECK(back.config().penalty_mode == PenaltyMode::SquaredFrobenius);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(test::bit_equal(back.recon_bases()[k].values(), m.recon_bases()[k].values()));
    CHECK(test::bit_equal(back.disc_bases()[k].values(), m.disc_bases()[k].values()));
  }
  CHECK(model_to_json(back) == text);
}

TEST_CASE("malformed models are rejected") {
  auto doc = json::parse(model_to_json(sample_model()));
  auto bad_version = doc;
  bad_version["version"] = "ddsc-model/0";
  CHECK_THROWS_AS(model_from_json(bad_version.dump()), Error);
  auto bad_t = doc;
  bad_t["T"] = 6;
  CHECK_THROWS_AS(model_from_json(bad_t.dump()), Error);
  auto negative = doc;
  negative["disc_bases"][0][0][0] = -0.5;
  CHECK_THROWS_AS(model_from_json(negative.dump()), Error);
  CHECK_THROWS_AS(model_from_json("{"), Error);
}

TEST_CASE("model files") {
  test::TempDir dir("model");
  const auto m = sample_model();
  save_model(dir / "m.json", m);
  CHECK(model_to_json(load_model(dir / "m.json")) == model_to_json(m));
  CHECK_THROWS_AS(load_model(dir / "absent.json"), Error);
}

TEST_CASE("config json: defaults, overrides and window") {
  const auto empty = config_from_json("{}");
  CHECK(empty.config.n_bases == 64);
  CHECK(empty.config.lambda == 0.1);
  CHECK(empty.config.alpha == 1e-4);
  CHECK(empty.config.tol == 1e-6);
  CHECK(empty.config.nnsc_max_iters == 100);
  CHECK(empty.config.dd_max_iters == 50);
  CHECK(empty.config.penalty_mode == PenaltyMode::L1);
  CHECK_FALSE(empty.window.has_value());

  const auto c = config_from_json(R"({"n_bases": 8, "lambda": 0.5, "penalty": "squared_frobenius", "T": 24})");
  CHECK(c.config.n_bases == 8);
  CHECK(c.config.lambda == 0.5);
  CHECK(c.config.penalty_mode == PenaltyMode::SquaredFrobenius);
  CHECK(*c.window == 24);

  const auto round = config_from_json(config_to_json(c.config));
  CHECK(round.config.n_bases == 8);
  CHECK(round.config.penalty_mode == PenaltyMode::SquaredFrobenius);

  CHECK_THROWS_AS(config_from_json(R"({"alpha": -1})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"penalty": "l0"})"), Error);
  CHECK_THROWS_AS(config_from_json("[]"), Error);
}

TEST_CASE("report csv mirrors the comparison table") {
  MetricsReport n;
  n.mode = PredictMode::NNSC;
  MetricsReport d;
  for (const auto& label : {"air", "other"}) {
    n.per_appliance.push_back({label, 0.5, 0.25, 0.125, 2, 0, 0});
    d.per_appliance.push_back({label, 0.25, std::nullopt, 0.0625, 2, 2, 0});
  }
  n.overall = {0.5, 0.25, 0.125};
  d.overall = {0.25, std::nullopt, 0.0625};
  const std::string csv = report_to_csv(n, d);
  CHECK(csv ==
        "appliance,mae_nnsc,mae_ddsc,sae_nnsc,sae_ddsc,nde_nnsc,nde_ddsc\n"
        "air,0.5,0.25,0.25,undefined,0.125,0.0625\n"
        "other,0.5,0.25,0.25,undefined,0.125,0.0625\n"
        "overall,0.5,0.25,0.25,undefined,0.125,0.0625\n");
  const auto doc = json::parse(report_to_json(n, d));
  CHECK(doc["ddsc"]["overall"]["sae"] == "undefined");
  CHECK(doc["nnsc"]["per_appliance"][1]["label"] == "other");
  CHECK(doc.contains("conventions"));
}

TEST_CASE("log records are single-line json") {
  const std::string dd = to_jsonl(DdIterationRecord{3, 1.5, 2.5, 0.25});
  CHECK(dd.find('\n') == std::string::npos);
  const auto doc = json::parse(dd);
  CHECK(doc["iteration"] == 3);
  CHECK(doc["error_recon"] == 1.5);
  CHECK(doc["error_disc"] == 2.5);
  const auto nn = json::parse(to_jsonl(NnscLogRecord{"air", 2, 4.0}));
  CHECK(nn["appliance"] == "air");
  CHECK(nn["round"] == 2);
}
