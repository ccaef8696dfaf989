#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddsc/nnsc.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

/// Activations of the aggregate against the concatenated bases, split back
/// into one block per appliance.
std::vector<Activations> disaggregation_solve(const Matrix& aggregate, const std::vector<Dictionary>& bases,
                                              const TrainConfig& config);

/// Structured-perceptron update on the concatenated discriminative bases:
///   B - alpha * ((X - B*A_hat)*A_hat' - (X - B*A_star)*A_star')
/// No projection is applied.
Matrix perceptron_step(const Matrix& aggregate, const Matrix& bases, const Matrix& a_hat,
                       const Matrix& a_star, double alpha);

/// One discriminative-training iteration as written to the training log.
struct DdIterationRecord {
  int iteration = 0;
  /// Augmented error with the reconstruction bases; drives best-tracking.
  double error_recon = 0.0;
  /// Same error evaluated with the discriminative bases.
  double error_disc = 0.0;
  /// Frobenius norm of the applied (pre-projection) basis change.
  double update_norm = 0.0;
};

struct DdscResult {
  std::vector<Dictionary> disc_bases;
  std::vector<DdIterationRecord> trace;
  int best_iteration = 0;
};

using DdObserver = std::function<void(const DdIterationRecord&)>;

/// Sees the discriminative bases right after each projected update.
using DdBasesObserver = std::function<void(int iteration, const std::vector<Dictionary>&)>;

/// Sum over appliances of 0.5*||X_k - B_k A_k||^2 + penalty(A_k).
double augmented_error(const ApplianceDataset& data, const std::vector<Dictionary>& bases,
                       const std::vector<Activations>& activations, const TrainConfig& config);

/// Early-stopping patience of the discriminative loop.
inline constexpr int kDdPatience = 5;

/// Discriminative refinement starting from the reconstruction bases. Each
/// iteration solves the aggregate against the current discriminative bases,
/// records the augmented error, applies the perceptron step and projects
/// each block. Stops after dd_max_iters iterations or kDdPatience
/// iterations without improvement; returns the bases with the lowest
/// recorded error.
DdscResult train_ddsc(const ApplianceDataset& data, const std::vector<Dictionary>& recon_bases,
                      const std::vector<Activations>& targets, const TrainConfig& config,
                      const DdObserver& observer = {}, const DdBasesObserver& on_bases = {});

/// Progress record from the NNSC stage.
struct NnscLogRecord {
  std::string appliance;
  int round = 0;
  double objective = 0.0;
};

struct FitObservers {
  std::function<void(const NnscLogRecord&)> nnsc;
  DdObserver dd;
};

/// Full training pipeline: NNSC per appliance, target activations, then
/// discriminative refinement (skipped when skip_dd is set, in which case
/// the discriminative bases equal the reconstruction bases).
DisaggModel fit_model(const ApplianceDataset& train, const TrainConfig& config, bool skip_dd = false,
                      const FitObservers& observers = {});

}  // namespace ddsc
