#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddsc/metrics.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

/// NNSC: activations and outputs use the reconstruction bases.
/// DDSC: activations and outputs use the discriminative bases.
enum class PredictMode { NNSC, DDSC };

std::string to_string(PredictMode mode);
PredictMode predict_mode_from_string(const std::string& text);

struct Prediction {
  /// One T x M estimate per appliance, in model label order.
  std::vector<Matrix> components;
  /// Per-appliance activation blocks.
  std::vector<Activations> activations;
  /// concat(bases) * stacked activations.
  Matrix reconstruction;
};

/// Decomposes an aggregate with the model. Throws WindowLengthMismatch when
/// the aggregate's row count differs from the model window.
Prediction predict_detailed(const Matrix& aggregate, const DisaggModel& model, PredictMode mode);

std::vector<UsageMatrix> predict(const UsageMatrix& aggregate, const DisaggModel& model, PredictMode mode);

/// sum_k 0.5*||truth_k - pred_k||_F^2.
double reconstruction_error(const std::vector<Matrix>& truth, const std::vector<Matrix>& predictions);

/// Disaggregation error: activations inferred from the aggregate alone (with
/// the bases selected by `mode`), components rebuilt with the
/// reconstruction bases and compared with the truth.
double disaggregation_error(const std::vector<UsageMatrix>& truth, const Matrix& aggregate,
                            const DisaggModel& model, PredictMode mode);

struct ApplianceMetrics {
  std::string label;
  double mae = 0.0;
  std::optional<double> sae;
  std::optional<double> nde;
  int columns = 0;
  int sae_undefined = 0;
  int nde_undefined = 0;
};

struct OverallMetrics {
  double mae = 0.0;
  std::optional<double> sae;
  std::optional<double> nde;
};

/// Per-appliance metrics are means over columns (house-weeks); columns
/// where SAE or NDE is undefined are excluded and counted. The overall row
/// is the unweighted mean over appliances with a defined value.
struct MetricsReport {
  PredictMode mode = PredictMode::DDSC;
  std::vector<ApplianceMetrics> per_appliance;
  OverallMetrics overall;
};

MetricsReport score_predictions(const std::vector<std::string>& labels, const std::vector<Matrix>& truth,
                                const std::vector<Matrix>& predictions, PredictMode mode);

MetricsReport evaluate(const ApplianceDataset& test, const DisaggModel& model, PredictMode mode);

}  // namespace ddsc
