#include <doctest.h>

#include "ddsc/ddsc.hpp"
#include "ddsc/disaggregation.hpp"
#include "support.hpp"

using namespace ddsc;

namespace {

TrainConfig exact_config() {
  TrainConfig c;
  c.n_bases = 2;
  c.lambda = 0.0;
  c.tol = 1e-14;
  c.solver_max_iters = 100000;
  return c;
}

/// Two appliances on disjoint rows; recon and disc bases coincide.
DisaggModel disjoint_model(const TrainConfig& c) {
  Matrix B1 = Matrix::Zero(4, 2);
  Matrix B2 = Matrix::Zero(4, 2);
  B1.topRows(2) = test::random_unit_columns(2, 2, 1);
  B2.bottomRows(2) = test::random_unit_columns(2, 2, 2);
  return DisaggModel({"a", "b"}, {Dictionary(B1), Dictionary(B2)}, {Dictionary(B1), Dictionary(B2)}, c);
}

}  // namespace

TEST_CASE("single appliance reproduces a representable aggregate") {
  const Matrix B = test::random_unit_columns(5, 3, 7);
  const Matrix X = B * test::random_matrix(3, 4, 8, 2.0);
  const DisaggModel model({"only"}, {Dictionary(B)}, {Dictionary(B)}, exact_config());
  for (auto mode : {PredictMode::NNSC, PredictMode::DDSC}) {
    const auto out = predict(UsageMatrix(X), model, mode);
    REQUIRE(out.size() == 1);
    CHECK((out[0].values() - X).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("zero aggregate predicts zero everywhere") {
  const auto model = disjoint_model(TrainConfig{});
  for (const auto& m : predict(UsageMatrix(Matrix::Zero(4, 3)), model, PredictMode::DDSC)) {
    CHECK(m.values().isZero(0.0));
  }
}

TEST_CASE("disjoint supports are recovered per component") {
  const TrainConfig c = exact_config();
  const auto model = disjoint_model(c);
  const Matrix X1 = model.recon_bases()[0].values() * test::random_matrix(2, 6, 3, 2.0);
  const Matrix X2 = model.recon_bases()[1].values() * test::random_matrix(2, 6, 4, 2.0);
  const auto out = predict(UsageMatrix(X1 + X2), model, PredictMode::DDSC);
  CHECK((out[0].values() - X1).norm() / X1.norm() <= 1e-3);
  CHECK((out[1].values() - X2).norm() / X2.norm() <= 1e-3);
  CHECK(disaggregation_error({UsageMatrix(X1), UsageMatrix(X2)}, X1 + X2, model, PredictMode::NNSC) <= 1e-12);
}

TEST_CASE("modes select different bases") {
  const Matrix B = test::random_unit_columns(4, 2, 11);
  const Matrix D = test::random_unit_columns(4, 2, 12) * 0.5;
  const DisaggModel model({"x"}, {Dictionary(B)}, {Dictionary(D)}, exact_config());
  const Matrix X = test::random_matrix(4, 2, 13);
  const auto n = predict_detailed(X, model, PredictMode::NNSC);
  const auto d = predict_detailed(X, model, PredictMode::DDSC);
  CHECK((n.components[0] - B * n.activations[0].values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d.components[0] - D * d.activations[0].values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(test::bit_equal(n.components[0], d.components[0]));
}

TEST_CASE("component predictions add up to the joint reconstruction") {
  CounterRng rng(3, 3);
  std::vector<Dictionary> bases;
  for (int k = 0; k < 5; ++k) bases.push_back(random_dictionary(24, 6, rng));
  TrainConfig c;
  c.lambda = 0.05;
  const DisaggModel model({"a", "b", "c", "d", "e"}, bases, bases, c);
  const Matrix X = test::random_matrix(24, 9, 14, 3.0);
  const auto p = predict_detailed(X, model, PredictMode::DDSC);
  Matrix sum = Matrix::Zero(24, 9);
  for (const auto& m : p.components) sum += m;
  CHECK((sum - p.reconstruction).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("window length is checked") {
  const auto model = disjoint_model(TrainConfig{});
  try {
    predict(UsageMatrix(Matrix::Ones(5, 1)), model, PredictMode::NNSC);
    FAIL("expected WindowLengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowLengthMismatch);
  }
}

TEST_CASE("reconstruction error") {
  Matrix one(1, 1);
  one << 1;
  CHECK(reconstruction_error({one}, {Matrix::Zero(1, 1)}) == 0.5);
  CHECK(reconstruction_error({one}, {one}) == 0.0);
  CHECK_THROWS_AS(reconstruction_error({one}, {Matrix::Zero(2, 1)}), Error);
}

TEST_CASE("discriminative bases do not raise the training disaggregation error") {
  TrainConfig c;
  c.n_bases = 3;
  c.lambda = 0.001;
  c.alpha = 1e-3;
  c.nnsc_max_iters = 60;
  c.dd_max_iters = 40;
  c.solver_max_iters = 2000;
  c.tol = 1e-10;
  Matrix B1 = test::random_unit_columns(8, 3, 1);
  Matrix B2 = test::random_unit_columns(8, 3, 2);
  B1.bottomRows(2).setZero();
  B2.topRows(2).setZero();
  const auto data = make_dataset({"one", "two"}, {UsageMatrix(B1 * test::random_matrix(3, 12, 3, 2.0)),
                                                  UsageMatrix(B2 * test::random_matrix(3, 12, 4, 2.0))});
  const auto model = fit_model(data, c);
  const double e_nnsc = disaggregation_error(data.components(), data.aggregate().values(), model, PredictMode::NNSC);
  const double e_ddsc = disaggregation_error(data.components(), data.aggregate().values(), model, PredictMode::DDSC);
  CHECK(e_ddsc <= e_nnsc);
}

TEST_CASE("perfect predictions score zero") {
  const TrainConfig c = exact_config();
  const auto model = disjoint_model(c);
  const Matrix X1 = model.recon_bases()[0].values() * test::random_matrix(2, 1, 5, 2.0);
  const Matrix X2 = model.recon_bases()[1].values() * test::random_matrix(2, 1, 6, 2.0);
  const auto data = make_dataset({"a", "b"}, {UsageMatrix(X1), UsageMatrix(X2)});
  const auto r = score_predictions(data.labels(), {X1, X2}, {X1, X2}, PredictMode::DDSC);
  CHECK(r.overall.mae == 0.0);
  CHECK(*r.overall.sae == 0.0);
  CHECK(*r.overall.nde == 0.0);
  const auto e = evaluate(data, model, PredictMode::DDSC);
  CHECK(e.overall.mae <= 1e-9);
  REQUIRE(e.per_appliance.size() == 2);
  CHECK(e.per_appliance[0].label == "a");
}

TEST_CASE("per-appliance means, undefined values excluded and counted") {
  Matrix truth(2, 3);
  truth << 1, 0, 2, 1, 0, 2;
  Matrix pred(2, 3);
  pred << 1, 1, 1, 3, 1, 1;
  const auto r = score_predictions({"x", "y"}, {truth, truth}, {pred, truth}, PredictMode::NNSC);
  const auto& x = r.per_appliance[0];
  // Column MAEs 1, 1, 1; SAE 1 and 0.5 with the zero column excluded.
  CHECK(x.mae == 1.0);
  CHECK(x.sae_undefined == 1);
  CHECK(*x.sae == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(x.nde_undefined == 1);
  CHECK(x.columns == 3);
  const auto& y = r.per_appliance[1];
  CHECK(y.mae == 0.0);
  CHECK(r.overall.mae == 0.5);
  CHECK(*r.overall.sae == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("all-undefined SAE stays undefined") {
  const Matrix z = Matrix::Zero(3, 2);
  const auto r = score_predictions({"x"}, {z}, {Matrix::Ones(3, 2)}, PredictMode::NNSC);
  CHECK_FALSE(r.per_appliance[0].sae.has_value());
  CHECK_FALSE(r.overall.sae.has_value());
  CHECK(r.per_appliance[0].sae_undefined == 2);
}

TEST_CASE("metrics do not depend on column order") {
  CounterRng rng(8, 8);
  std::vector<Dictionary> bases{random_dictionary(6, 3, rng), random_dictionary(6, 3, rng)};
  TrainConfig c;
  c.lambda = 0.05;
  const DisaggModel model({"a", "b"}, bases, bases, c);
  const auto data = make_dataset({"a", "b"}, {UsageMatrix(test::random_matrix(6, 5, 1)),
                                              UsageMatrix(test::random_matrix(6, 5, 2))});
  const auto shuffled = data.select_columns({3, 0, 4, 2, 1});
  const auto r1 = evaluate(data, model, PredictMode::NNSC);
  const auto r2 = evaluate(shuffled, model, PredictMode::NNSC);
  CHECK(std::abs(r1.overall.mae - r2.overall.mae) <= 1e-12);
  CHECK(std::abs(*r1.overall.sae - *r2.overall.sae) <= 1e-12);
  CHECK(std::abs(*r1.overall.nde - *r2.overall.nde) <= 1e-12);
}

TEST_CASE("mode names") {
  CHECK(predict_mode_from_string("nnsc") == PredictMode::NNSC);
  CHECK(predict_mode_from_string(to_string(PredictMode::DDSC)) == PredictMode::DDSC);
  CHECK_THROWS_AS(predict_mode_from_string("both"), Error);
}
