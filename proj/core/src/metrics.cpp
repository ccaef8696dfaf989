#include "ddsc/metrics.hpp"

#include <cmath>

#include "ddsc/errors.hpp"

namespace ddsc {

namespace {

void check_lengths(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lengths differ");
  }
  if (truth.size() < 1) throw Error(ErrorCode::LengthMismatch, "metrics need T >= 1");
}

}  // namespace

double mae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  check_lengths(truth, pred);
  return (pred - truth).cwiseAbs().sum() / static_cast<double>(truth.size());
}

std::optional<double> try_sae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  check_lengths(truth, pred);
  const double r = truth.sum();
  if (r == 0.0) return std::nullopt;
  return std::abs(pred.sum() - r) / r;
}

double sae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  auto v = try_sae(truth, pred);
  if (!v) throw Error(ErrorCode::ZeroTruthTotal, "SAE undefined for zero truth total");
  return *v;
}

std::optional<double> try_nde(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  check_lengths(truth, pred);
  const double energy = truth.squaredNorm();
  if (energy == 0.0) return std::nullopt;
  return (pred - truth).squaredNorm() / energy;
}

double nde(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  auto v = try_nde(truth, pred);
  if (!v) throw Error(ErrorCode::ZeroTruthEnergy, "NDE undefined for zero truth energy");
  return *v;
}

}  // namespace ddsc
