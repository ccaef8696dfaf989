#include "ddsc/sparse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddsc/parallel.hpp"

namespace ddsc {

namespace {

constexpr double kMultiplicativeEps = 1e-12;
// Gradient is recomputed from scratch this often to stop rank-1 drift.
constexpr int kGradientRefresh = 16;

double penalty_slope(double a, double lambda, PenaltyMode mode) {
  return mode == PenaltyMode::L1 ? lambda : 2.0 * lambda * a;
}

double column_penalty(const Vector& a, double lambda, PenaltyMode mode) {
  return mode == PenaltyMode::L1 ? lambda * a.sum() : lambda * a.squaredNorm();
}

struct ColumnResult {
  int sweeps = 0;
  bool converged = false;
};

// KKT violation for one column given the smooth-part gradient g = G a - c.
double column_kkt(const Vector& a, const Vector& g, double lambda, PenaltyMode mode) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double d = g(j) + penalty_slope(a(j), lambda, mode);
    worst = std::max(worst, a(j) > 0.0 ? std::abs(d) : std::max(0.0, -d));
  }
  return worst;
}

ColumnResult solve_column(const Matrix& gram, const Vector& c, double x_sq, Vector& a,
                          const ActivationParams& p) {
  const Eigen::Index n = a.size();
  Vector g = gram * a - c;
  auto objective = [&] {
    // 0.5||x||^2 - c'a + 0.5 a'Ga, written through g.
    return 0.5 * x_sq + 0.5 * a.dot(g - c) + column_penalty(a, p.lambda, p.penalty);
  };
  double prev_obj = objective();
  ColumnResult result;
  for (int sweep = 1; sweep <= p.max_iters; ++sweep) {
    result.sweeps = sweep;
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gjj = gram(j, j);
      const double old = a(j);
      double next = 0.0;
      if (gjj > 0.0) {
        if (p.penalty == PenaltyMode::L1) {
          next = std::max(0.0, old - (g(j) + p.lambda) / gjj);
        } else {
          next = std::max(0.0, (gjj * old - g(j)) / (gjj + 2.0 * p.lambda));
        }
      }
      if (next != old) {
        const double delta = next - old;
        g.noalias() += delta * gram.col(j);
        a(j) = next;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (sweep % kGradientRefresh == 0) g.noalias() = gram * a - c;
    if (max_delta < p.tol) {
      result.converged = true;
      break;
    }
    const double obj = objective();
    const double rel = std::abs(prev_obj - obj) / std::max(std::abs(prev_obj), 1e-300);
    prev_obj = obj;
    if (rel < p.tol && column_kkt(a, g, p.lambda, p.penalty) <= p.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// Euclidean projection onto {b >= 0, ||b|| <= 1}, per column.
void project_nonneg_ball(Matrix& B) {
  B = B.cwiseMax(0.0);
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const double norm = B.col(j).norm();
    if (norm > 1.0 + kNormSlack) B.col(j) /= norm;
  }
}

double recon_objective(const Matrix& X, const Matrix& B, const Matrix& A) {
  return 0.5 * (X - B * A).squaredNorm();
}

}  // namespace

double penalty_value(const Matrix& A, double lambda, PenaltyMode mode) {
  return mode == PenaltyMode::L1 ? lambda * A.sum() : lambda * A.squaredNorm();
}

double sparse_objective(const Matrix& X, const Matrix& B, const Matrix& A, double lambda,
                        PenaltyMode mode) {
  return recon_objective(X, B, A) + penalty_value(A, lambda, mode);
}

double kkt_residual(const Matrix& X, const Matrix& B, const Matrix& A, double lambda,
                    PenaltyMode mode) {
  const Matrix grad = B.transpose() * (B * A - X);
  double worst = 0.0;
  for (Eigen::Index m = 0; m < A.cols(); ++m) {
    worst = std::max(worst, column_kkt(A.col(m), grad.col(m), lambda, mode));
  }
  return worst;
}

ActivationSolve solve_activations(const Matrix& X, const Dictionary& B, const ActivationParams& params,
                                  const Matrix* warm_start) {
  require_finite(X, "X");
  if (X.rows() != B.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "X rows differ from dictionary rows");
  }
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw Error(ErrorCode::NonFiniteInput, "lambda must be finite and non-negative");
  }
  const Eigen::Index n = B.n();
  const Eigen::Index M = X.cols();
  Matrix A = Matrix::Zero(n, M);
  if (warm_start != nullptr) {
    if (warm_start->rows() != n || warm_start->cols() != M) {
      throw Error(ErrorCode::DimensionMismatch, "warm start has wrong shape");
    }
    require_finite(*warm_start, "warm start");
    A = warm_start->cwiseMax(0.0);
  }

  const Matrix& Bv = B.values();
  const Matrix gram = Bv.transpose() * Bv;
  std::vector<ColumnResult> results(static_cast<std::size_t>(M));
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t idx) {
    const auto m = static_cast<Eigen::Index>(idx);
    const Vector x = X.col(m);
    const Vector c = Bv.transpose() * x;
    Vector a = A.col(m);
    results[idx] = solve_column(gram, c, x.squaredNorm(), a, params);
    A.col(m) = a;
  });

  SolveReport report;
  report.converged = true;
  for (const auto& r : results) {
    report.iterations = std::max(report.iterations, r.sweeps);
    report.converged = report.converged && r.converged;
  }
  report.final_objective = sparse_objective(X, Bv, A, params.lambda, params.penalty);
  return {Activations(std::move(A)), report};
}

Dictionary project_dictionary(const Matrix& raw, CounterRng& rng) {
  require_finite(raw, "dictionary");
  Matrix B = raw;
  project_nonneg_ball(B);
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    if (B.col(j).isZero(0.0)) {
      for (Eigen::Index t = 0; t < B.rows(); ++t) B(t, j) = rng.uniform_open_closed();
      B.col(j) /= B.col(j).norm();
    }
  }
  return Dictionary(std::move(B));
}

Dictionary random_dictionary(Eigen::Index rows, Eigen::Index n, CounterRng& rng) {
  Matrix B(rows, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index t = 0; t < rows; ++t) B(t, j) = rng.uniform_open_closed();
    B.col(j) /= B.col(j).norm();
  }
  return Dictionary(std::move(B));
}

DictionaryUpdate update_dictionary(const Matrix& X, const Activations& A, const Dictionary& B_init,
                                   int max_iters, double tol, CounterRng& rng) {
  require_finite(X, "X");
  const Matrix& Av = A.values();
  if (X.rows() != B_init.rows() || X.cols() != Av.cols() || Av.rows() != B_init.n()) {
    throw Error(ErrorCode::DimensionMismatch, "update_dictionary shapes disagree");
  }

  Matrix B = B_init.values();
  double current = recon_objective(X, B, Av);
  DictionaryUpdate out{B_init, {}, {current}};

  const Vector row_norms = Av.rowwise().norm();
  if (row_norms.maxCoeff() == 0.0) {
    out.report = {1, current, true};
    return out;
  }

  const Matrix AAt = Av * Av.transpose();
  const Matrix XAt = X * Av.transpose();
  const double lipschitz =
      std::max(Eigen::SelfAdjointEigenSolver<Matrix>(AAt, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
               std::numeric_limits<double>::min());

  auto accept_if_better = [&](Matrix& candidate) {
    const double obj = recon_objective(X, candidate, Av);
    if (obj <= current) return obj;
    return std::numeric_limits<double>::infinity();
  };

  for (int it = 1; it <= max_iters; ++it) {
    out.report.iterations = it;

    Matrix candidate = B;
    const Matrix denom = B * AAt;
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      if (row_norms(j) == 0.0) continue;
      candidate.col(j) = B.col(j).cwiseProduct(XAt.col(j)).cwiseQuotient(
          (denom.col(j).array() + kMultiplicativeEps).matrix());
    }
    candidate = project_dictionary(candidate, rng).values();
    double obj = accept_if_better(candidate);

    if (!std::isfinite(obj)) {
      candidate = B - (B * AAt - XAt) / lipschitz;
      project_nonneg_ball(candidate);
      obj = accept_if_better(candidate);
    }
    if (!std::isfinite(obj)) {
      out.report.converged = true;
      break;
    }

    const double max_change = (candidate - B).cwiseAbs().maxCoeff();
    const double rel = (current - obj) / std::max(current, 1e-300);
    B = std::move(candidate);
    current = obj;
    out.objective_trace.push_back(current);
    if (rel < tol || max_change < tol) {
      out.report.converged = true;
      break;
    }
  }
  out.report.final_objective = current;
  out.dictionary = Dictionary(std::move(B));
  return out;
}

}  // namespace ddsc
