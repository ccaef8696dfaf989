#include "ddsc/ddsc.hpp"

#include <limits>

#include "ddsc/parallel.hpp"
#include "ddsc/rng.hpp"
#include "ddsc/sparse_solver.hpp"

namespace ddsc {

std::vector<Activations> disaggregation_solve(const Matrix& aggregate, const std::vector<Dictionary>& bases,
                                              const TrainConfig& config) {
  if (bases.empty()) throw Error(ErrorCode::DimensionMismatch, "no bases given");
  const Dictionary joint(concat_bases(bases));
  auto solve = solve_activations(aggregate, joint, activation_params(config));
  std::vector<Activations> blocks;
  blocks.reserve(bases.size());
  for (auto& m : split_rows(solve.activations.values(), block_sizes(bases))) {
    blocks.emplace_back(std::move(m));
  }
  return blocks;
}

Matrix perceptron_step(const Matrix& aggregate, const Matrix& bases, const Matrix& a_hat,
                       const Matrix& a_star, double alpha) {
  if (aggregate.rows() != bases.rows() || a_hat.rows() != bases.cols() ||
      a_star.rows() != bases.cols() || a_hat.cols() != aggregate.cols() ||
      a_star.cols() != aggregate.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "perceptron_step shapes disagree");
  }
  const Matrix hat_term = (aggregate - bases * a_hat) * a_hat.transpose();
  const Matrix star_term = (aggregate - bases * a_star) * a_star.transpose();
  return bases - alpha * (hat_term - star_term);
}

double augmented_error(const ApplianceDataset& data, const std::vector<Dictionary>& bases,
                       const std::vector<Activations>& activations, const TrainConfig& config) {
  if (bases.size() != data.k() || activations.size() != data.k()) {
    throw Error(ErrorCode::DimensionMismatch, "augmented_error needs one block per appliance");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < data.k(); ++k) {
    total += sparse_objective(data.components()[k].values(), bases[k].values(), activations[k].values(),
                              config.lambda, config.penalty_mode);
  }
  return total;
}

namespace {

Matrix stack_rows(const std::vector<Activations>& blocks) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Matrix out(rows, blocks.front().cols());
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    out.middleRows(offset, b.rows()) = b.values();
    offset += b.rows();
  }
  return out;
}

}  // namespace

DdscResult train_ddsc(const ApplianceDataset& data, const std::vector<Dictionary>& recon_bases,
                      const std::vector<Activations>& targets, const TrainConfig& config,
                      const DdObserver& observer, const DdBasesObserver& on_bases) {
  config.validate();
  if (recon_bases.size() != data.k() || targets.size() != data.k()) {
    throw Error(ErrorCode::DimensionMismatch, "train_ddsc needs one dictionary and target per appliance");
  }
  const Matrix& aggregate = data.aggregate().values();
  const Matrix a_star = stack_rows(targets);
  const auto sizes = block_sizes(recon_bases);
  CounterRng rng(config.seed, stream_id("ddsc"));

  std::vector<Dictionary> disc = recon_bases;
  DdscResult result{disc, {}, 0};
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int it = 0; it <= config.dd_max_iters; ++it) {
    const auto a_hat_blocks = disaggregation_solve(aggregate, disc, config);
    DdIterationRecord record;
    record.iteration = it;
    record.error_recon = augmented_error(data, recon_bases, a_hat_blocks, config);
    record.error_disc = augmented_error(data, disc, a_hat_blocks, config);

    if (record.error_recon < best) {
      best = record.error_recon;
      result.disc_bases = disc;
      result.best_iteration = it;
      stale = 0;
    } else {
      ++stale;
    }

    if (stale < kDdPatience && it < config.dd_max_iters) {
      const Matrix current = concat_bases(disc);
      const Matrix stepped = perceptron_step(aggregate, current, stack_rows(a_hat_blocks), a_star, config.alpha);
      record.update_norm = (stepped - current).norm();
      auto blocks = split_rows(stepped.transpose(), sizes);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        disc[k] = project_dictionary(blocks[k].transpose(), rng);
      }
      if (on_bases) on_bases(it, disc);
    }

    result.trace.push_back(record);
    if (observer) observer(record);
    if (stale >= kDdPatience) break;
  }
  return result;
}

DisaggModel fit_model(const ApplianceDataset& train, const TrainConfig& config, bool skip_dd,
                      const FitObservers& observers) {
  config.validate();
  const std::size_t K = train.k();
  std::vector<std::optional<NnscResult>> nnsc(K);
  parallel_for(K, [&](std::size_t k) { nnsc[k] = train_nnsc(train.components()[k], config, k); });

  std::vector<Dictionary> recon;
  recon.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (observers.nnsc) {
      const auto& trace = nnsc[k]->objective_trace;
      for (std::size_t r = 0; r < trace.size(); ++r) {
        observers.nnsc({train.labels()[k], static_cast<int>(r), trace[r]});
      }
    }
    recon.push_back(nnsc[k]->bases);
  }

  if (skip_dd) return DisaggModel(train.labels(), recon, recon, config);

  std::vector<Activations> targets;
  targets.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    targets.push_back(compute_target_activations(train.components()[k], recon[k], config));
  }
  auto dd = train_ddsc(train, recon, targets, config, observers.dd);
  return DisaggModel(train.labels(), std::move(recon), std::move(dd.disc_bases), config);
}

}  // namespace ddsc
