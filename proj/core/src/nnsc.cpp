#include "ddsc/nnsc.hpp"

#include <cmath>

namespace ddsc {

ActivationParams activation_params(const TrainConfig& config) {
  return {config.lambda, config.penalty_mode, config.solver_max_iters, config.tol};
}

NnscResult train_nnsc(const UsageMatrix& X, const TrainConfig& config, std::uint64_t stream) {
  config.validate();
  const Matrix& Xv = X.values();
  CounterRng rng(config.seed, stream_id("nnsc", stream));
  const ActivationParams params = activation_params(config);

  Dictionary B = random_dictionary(Xv.rows(), config.n_bases, rng);
  auto solve = solve_activations(Xv, B, params);
  Activations A = std::move(solve.activations);

  NnscResult result{B, A, {solve.report.final_objective}, false};
  double current = solve.report.final_objective;
  for (int round = 0; round < config.nnsc_max_iters; ++round) {
    auto dict = update_dictionary(Xv, A, B, config.solver_max_iters, config.tol, rng);
    B = std::move(dict.dictionary);
    auto next = solve_activations(Xv, B, params, &A.values());
    A = std::move(next.activations);
    const double obj = next.report.final_objective;
    result.objective_trace.push_back(obj);
    const double rel = std::abs(current - obj) / std::max(std::abs(current), 1e-300);
    current = obj;
    if (obj == 0.0 || rel < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.bases = std::move(B);
  result.activations = std::move(A);
  return result;
}

Activations compute_target_activations(const UsageMatrix& X, const Dictionary& B, const TrainConfig& config) {
  return solve_activations(X.values(), B, activation_params(config)).activations;
}

}  // namespace ddsc
