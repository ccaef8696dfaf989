#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddsc/errors.hpp"

namespace ddsc {

/// Dense column-major matrix. Columns are examples (house-weeks).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute per-entry tolerance for aggregate == sum(components).
inline constexpr double kAggregateTolerance = 1e-9;
/// Slack allowed on dictionary column norms.
inline constexpr double kNormSlack = 1e-12;

/// Energy readings, kWh per interval. T rows, M columns.
class UsageMatrix {
 public:
  explicit UsageMatrix(Matrix values, std::int64_t interval_seconds = 3600,
                       std::optional<std::int64_t> start_timestamp = std::nullopt);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  std::int64_t interval_seconds() const noexcept { return interval_seconds_; }
  const std::optional<std::int64_t>& start_timestamp() const noexcept { return start_timestamp_; }

 private:
  Matrix values_;
  std::int64_t interval_seconds_;
  std::optional<std::int64_t> start_timestamp_;
};

/// Non-negative basis matrix (T x n) with column norms <= 1.
class Dictionary {
 public:
  explicit Dictionary(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index n() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// Non-negative activation matrix (n x M).
class Activations {
 public:
  explicit Activations(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
};

/// Labelled per-appliance matrices plus their aggregate, all T x M.
class ApplianceDataset {
 public:
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<UsageMatrix>& components() const noexcept { return components_; }
  const UsageMatrix& aggregate() const noexcept { return aggregate_; }
  std::size_t k() const noexcept { return labels_.size(); }
  Eigen::Index window() const noexcept { return aggregate_.rows(); }
  Eigen::Index examples() const noexcept { return aggregate_.cols(); }

  /// Column subset, in the given order.
  ApplianceDataset select_columns(const std::vector<Eigen::Index>& columns) const;

 private:
  friend ApplianceDataset make_dataset(std::vector<std::string>, std::vector<UsageMatrix>,
                                       std::optional<UsageMatrix>);
  ApplianceDataset(std::vector<std::string> labels, std::vector<UsageMatrix> components,
                   UsageMatrix aggregate)
      : labels_(std::move(labels)),
        components_(std::move(components)),
        aggregate_(std::move(aggregate)) {}

  std::vector<std::string> labels_;
  std::vector<UsageMatrix> components_;
  UsageMatrix aggregate_;
};

/// Validates shapes and the lossless relation; computes the aggregate when
/// omitted.
ApplianceDataset make_dataset(std::vector<std::string> labels, std::vector<UsageMatrix> components,
                              std::optional<UsageMatrix> aggregate = std::nullopt);

enum class PenaltyMode { L1, SquaredFrobenius };

std::string to_string(PenaltyMode mode);
PenaltyMode penalty_mode_from_string(const std::string& text);

struct TrainConfig {
  int n_bases = 64;
  double lambda = 0.1;
  double alpha = 1e-4;
  int nnsc_max_iters = 100;
  int dd_max_iters = 50;
  int solver_max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  PenaltyMode penalty_mode = PenaltyMode::L1;

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;
};

class DisaggModel {
 public:
  DisaggModel(std::vector<std::string> labels, std::vector<Dictionary> recon_bases,
              std::vector<Dictionary> disc_bases, TrainConfig config);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Dictionary>& recon_bases() const noexcept { return recon_bases_; }
  const std::vector<Dictionary>& disc_bases() const noexcept { return disc_bases_; }
  const TrainConfig& config() const noexcept { return config_; }
  Eigen::Index window() const noexcept { return window_; }
  std::size_t k() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::vector<Dictionary> recon_bases_;
  std::vector<Dictionary> disc_bases_;
  TrainConfig config_;
  Eigen::Index window_ = 0;
};

/// Horizontal concatenation [B_1, ..., B_K].
Matrix concat_bases(const std::vector<Dictionary>& bases);

/// Column counts of each block, in order.
std::vector<Eigen::Index> block_sizes(const std::vector<Dictionary>& bases);

/// Splits stacked rows back into per-block matrices.
std::vector<Matrix> split_rows(const Matrix& stacked, const std::vector<Eigen::Index>& sizes);

/// Throws NonFiniteInput if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

}  // namespace ddsc
