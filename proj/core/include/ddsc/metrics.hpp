#pragma once

#include <optional>

#include <Eigen/Dense>

namespace ddsc {

/// (1/T) * sum_t |pred(t) - truth(t)|, in kWh.
double mae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

/// |sum(pred) - sum(truth)| / sum(truth). Throws ZeroTruthTotal when the
/// truth total is zero.
double sae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

/// sum (pred - truth)^2 / sum truth^2. Throws ZeroTruthEnergy when the truth
/// has no energy.
double nde(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

/// Non-throwing forms: nullopt where the metric is undefined.
std::optional<double> try_sae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);
std::optional<double> try_nde(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

}  // namespace ddsc
