#pragma once

#include <vector>

#include "ddsc/rng.hpp"
#include "ddsc/types.hpp"

namespace ddsc {

struct SolveReport {
  int iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
};

struct ActivationParams {
  double lambda = 0.0;
  PenaltyMode penalty = PenaltyMode::L1;
  int max_iters = 500;
  double tol = 1e-6;
};

struct ActivationSolve {
  Activations activations;
  SolveReport report;
};

/// Minimizes 0.5*||X - B A||_F^2 + penalty(A) over A >= 0 by cyclic
/// coordinate descent, column by column. The L1 penalty is
/// lambda * sum(A); the squared-Frobenius penalty is lambda * ||A||_F^2.
///
/// Columns are independent and may be solved concurrently; results do not
/// depend on the worker count. `warm_start`, when given, must be n x M and
/// non-negative.
ActivationSolve solve_activations(const Matrix& X, const Dictionary& B, const ActivationParams& params,
                                  const Matrix* warm_start = nullptr);

/// lambda * sum(A) or lambda * ||A||_F^2.
double penalty_value(const Matrix& A, double lambda, PenaltyMode mode);

/// 0.5*||X - B A||_F^2 + penalty(A).
double sparse_objective(const Matrix& X, const Matrix& B, const Matrix& A, double lambda,
                        PenaltyMode mode);

/// Largest violation of the non-negative KKT conditions. For A_ij > 0 this
/// is |d_ij|, for A_ij == 0 it is max(0, -d_ij), where d is the gradient of
/// the objective.
double kkt_residual(const Matrix& X, const Matrix& B, const Matrix& A, double lambda, PenaltyMode mode);

struct DictionaryUpdate {
  Dictionary dictionary;
  SolveReport report;
  /// 0.5*||X - B A||_F^2 before the first step and after every accepted step.
  std::vector<double> objective_trace;
};

/// Multiplicative update B <- B .* (X A') ./ (B A A' + eps), followed by
/// projection onto the constraint set. A step that would raise the
/// objective is replaced by a projected-gradient step with step 1/L, which
/// cannot. Columns whose activation row is all zero are left untouched.
DictionaryUpdate update_dictionary(const Matrix& X, const Activations& A, const Dictionary& B_init,
                                   int max_iters, double tol, CounterRng& rng);

/// Clamps negatives to zero, rescales columns with norm above 1 to unit norm
/// and re-seeds all-zero columns with a random unit-norm non-negative column.
/// Idempotent.
Dictionary project_dictionary(const Matrix& raw, CounterRng& rng);

/// Dictionary with i.i.d. uniform (0,1] entries and unit-norm columns.
Dictionary random_dictionary(Eigen::Index rows, Eigen::Index n, CounterRng& rng);

}  // namespace ddsc
