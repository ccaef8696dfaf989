#include "ddsc/disaggregation.hpp"

#include "ddsc/ddsc.hpp"

namespace ddsc {

std::string to_string(PredictMode mode) { return mode == PredictMode::NNSC ? "nnsc" : "ddsc"; }

PredictMode predict_mode_from_string(const std::string& text) {
  if (text == "nnsc" || text == "NNSC") return PredictMode::NNSC;
  if (text == "ddsc" || text == "DDSC") return PredictMode::DDSC;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + text + "' (expected nnsc or ddsc)");
}

namespace {

const std::vector<Dictionary>& bases_for(const DisaggModel& model, PredictMode mode) {
  return mode == PredictMode::NNSC ? model.recon_bases() : model.disc_bases();
}

void check_window(const Matrix& aggregate, const DisaggModel& model) {
  if (aggregate.rows() != model.window()) {
    throw Error(ErrorCode::WindowLengthMismatch,
                "aggregate has " + std::to_string(aggregate.rows()) + " rows, model expects " +
                    std::to_string(model.window()));
  }
}

}  // namespace

Prediction predict_detailed(const Matrix& aggregate, const DisaggModel& model, PredictMode mode) {
  check_window(aggregate, model);
  const auto& bases = bases_for(model, mode);
  Prediction out;
  out.activations = disaggregation_solve(aggregate, bases, model.config());
  Matrix stacked(concat_bases(bases).cols(), aggregate.cols());
  Eigen::Index offset = 0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    out.components.push_back(bases[k].values() * out.activations[k].values());
    stacked.middleRows(offset, bases[k].n()) = out.activations[k].values();
    offset += bases[k].n();
  }
  out.reconstruction = concat_bases(bases) * stacked;
  return out;
}

std::vector<UsageMatrix> predict(const UsageMatrix& aggregate, const DisaggModel& model, PredictMode mode) {
  auto detailed = predict_detailed(aggregate.values(), model, mode);
  std::vector<UsageMatrix> out;
  out.reserve(detailed.components.size());
  for (auto& m : detailed.components) {
    // Products of non-negative factors; cwiseMax only removes signed zeros.
    out.emplace_back(m.cwiseMax(0.0), aggregate.interval_seconds(), aggregate.start_timestamp());
  }
  return out;
}

double reconstruction_error(const std::vector<Matrix>& truth, const std::vector<Matrix>& predictions) {
  if (truth.size() != predictions.size()) {
    throw Error(ErrorCode::ShapeMismatch, "truth and prediction counts differ");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k].rows() != predictions[k].rows() || truth[k].cols() != predictions[k].cols()) {
      throw Error(ErrorCode::ShapeMismatch, "truth and prediction shapes differ");
    }
    total += 0.5 * (truth[k] - predictions[k]).squaredNorm();
  }
  return total;
}

double disaggregation_error(const std::vector<UsageMatrix>& truth, const Matrix& aggregate,
                            const DisaggModel& model, PredictMode mode) {
  if (truth.size() != model.k()) throw Error(ErrorCode::ShapeMismatch, "one truth matrix per appliance required");
  check_window(aggregate, model);
  const auto activations = disaggregation_solve(aggregate, bases_for(model, mode), model.config());
  std::vector<Matrix> t;
  std::vector<Matrix> p;
  for (std::size_t k = 0; k < model.k(); ++k) {
    t.push_back(truth[k].values());
    p.push_back(model.recon_bases()[k].values() * activations[k].values());
  }
  return reconstruction_error(t, p);
}

MetricsReport score_predictions(const std::vector<std::string>& labels, const std::vector<Matrix>& truth,
                                const std::vector<Matrix>& predictions, PredictMode mode) {
  if (labels.size() != truth.size() || truth.size() != predictions.size()) {
    throw Error(ErrorCode::ShapeMismatch, "labels, truth and predictions must align");
  }
  MetricsReport report;
  report.mode = mode;
  double mae_sum = 0.0;
  double sae_sum = 0.0;
  double nde_sum = 0.0;
  int sae_count = 0;
  int nde_count = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (truth[k].rows() != predictions[k].rows() || truth[k].cols() != predictions[k].cols()) {
      throw Error(ErrorCode::ShapeMismatch, "shape mismatch for " + labels[k]);
    }
    ApplianceMetrics am;
    am.label = labels[k];
    am.columns = static_cast<int>(truth[k].cols());
    double mae_acc = 0.0;
    double sae_acc = 0.0;
    double nde_acc = 0.0;
    int sae_n = 0;
    int nde_n = 0;
    for (Eigen::Index m = 0; m < truth[k].cols(); ++m) {
      const Eigen::VectorXd x = truth[k].col(m);
      const Eigen::VectorXd y = predictions[k].col(m);
      mae_acc += mae(x, y);
      if (auto s = try_sae(x, y)) {
        sae_acc += *s;
        ++sae_n;
      } else {
        ++am.sae_undefined;
      }
      if (auto d = try_nde(x, y)) {
        nde_acc += *d;
        ++nde_n;
      } else {
        ++am.nde_undefined;
      }
    }
    am.mae = am.columns > 0 ? mae_acc / am.columns : 0.0;
    if (sae_n > 0) am.sae = sae_acc / sae_n;
    if (nde_n > 0) am.nde = nde_acc / nde_n;

    mae_sum += am.mae;
    if (am.sae) {
      sae_sum += *am.sae;
      ++sae_count;
    }
    if (am.nde) {
      nde_sum += *am.nde;
      ++nde_count;
    }
    report.per_appliance.push_back(std::move(am));
  }
  if (!labels.empty()) report.overall.mae = mae_sum / static_cast<double>(labels.size());
  if (sae_count > 0) report.overall.sae = sae_sum / sae_count;
  if (nde_count > 0) report.overall.nde = nde_sum / nde_count;
  return report;
}

MetricsReport evaluate(const ApplianceDataset& test, const DisaggModel& model, PredictMode mode) {
  if (test.labels() != model.labels()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset labels differ from model labels");
  }
  auto pred = predict_detailed(test.aggregate().values(), model, mode);
  std::vector<Matrix> truth;
  for (const auto& c : test.components()) truth.push_back(c.values());
  return score_predictions(test.labels(), truth, pred.components, mode);
}

}  // namespace ddsc
