#pragma once

#include <functional>
#include <vector>

#include "ddsc/sparse_solver.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

struct NnscResult {
  Dictionary bases;
  Activations activations;
  /// Penalized objective after initialization and after every alternation.
  std::vector<double> objective_trace;
  bool converged = false;
};

/// Per-appliance non-negative sparse coding. Alternates an activation solve
/// (warm-started, run to convergence) with a dictionary update until the
/// relative objective change falls below config.tol or nnsc_max_iters
/// alternations have run. `stream` selects the RNG stream so appliances
/// trained in parallel draw independent initial dictionaries.
NnscResult train_nnsc(const UsageMatrix& X, const TrainConfig& config, std::uint64_t stream = 0);

/// Sparse codes of X against fixed bases, solved from a zero start.
Activations compute_target_activations(const UsageMatrix& X, const Dictionary& B, const TrainConfig& config);

ActivationParams activation_params(const TrainConfig& config);

}  // namespace ddsc
