#include "ddsc/types.hpp"

#include <cmath>
#include <sstream>

namespace ddsc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::AggregateInconsistent: return "AggregateInconsistent";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WindowLengthMismatch: return "WindowLengthMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroTruthTotal: return "ZeroTruthTotal";
    case ErrorCode::ZeroTruthEnergy: return "ZeroTruthEnergy";
    case ErrorCode::UnitUndeclared: return "UnitUndeclared";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientHouses: return "InsufficientHouses";
    case ErrorCode::NoCompleteWeeks: return "NoCompleteWeeks";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, std::string(what) + " has non-finite entries");
  }
}

namespace {

void require_non_negative(const Matrix& m, const char* what) {
  require_finite(m, what);
  if (m.size() > 0 && m.minCoeff() < 0.0) {
    throw Error(ErrorCode::NegativeEntry, std::string(what) + " has negative entries");
  }
}

}  // namespace

UsageMatrix::UsageMatrix(Matrix values, std::int64_t interval_seconds,
                         std::optional<std::int64_t> start_timestamp)
    : values_(std::move(values)),
      interval_seconds_(interval_seconds),
      start_timestamp_(start_timestamp) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "usage matrix must be at least 1x1");
  }
  if (interval_seconds_ <= 0) {
    throw Error(ErrorCode::InvalidConfig, "interval_seconds must be positive");
  }
  require_non_negative(values_, "usage matrix");
}

Dictionary::Dictionary(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "dictionary must have T >= 1 and n >= 1");
  }
  require_non_negative(values_, "dictionary");
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    const double norm = values_.col(j).norm();
    if (norm > 1.0 + kNormSlack) {
      std::ostringstream os;
      os << "dictionary column " << j << " has norm " << norm << " > 1";
      throw Error(ErrorCode::ConstraintViolation, os.str());
    }
  }
}

Activations::Activations(Matrix values) : values_(std::move(values)) {
  require_non_negative(values_, "activations");
}

ApplianceDataset make_dataset(std::vector<std::string> labels, std::vector<UsageMatrix> components,
                              std::optional<UsageMatrix> aggregate) {
  if (components.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "dataset needs at least one component");
  }
  if (labels.size() != components.size()) {
    throw Error(ErrorCode::ShapeMismatch, "label count differs from component count");
  }
  const auto rows = components.front().rows();
  const auto cols = components.front().cols();
  const auto interval = components.front().interval_seconds();
  Matrix sum = Matrix::Zero(rows, cols);
  for (const auto& c : components) {
    if (c.rows() != rows || c.cols() != cols) {
      throw Error(ErrorCode::ShapeMismatch, "components have differing shapes");
    }
    sum += c.values();
  }
  if (!aggregate) {
    aggregate.emplace(std::move(sum), interval, components.front().start_timestamp());
  } else {
    if (aggregate->rows() != rows || aggregate->cols() != cols) {
      throw Error(ErrorCode::ShapeMismatch, "aggregate shape differs from components");
    }
    const double gap = (aggregate->values() - sum).cwiseAbs().maxCoeff();
    if (gap > kAggregateTolerance) {
      std::ostringstream os;
      os << "aggregate differs from component sum by " << gap;
      throw Error(ErrorCode::AggregateInconsistent, os.str());
    }
  }
  return ApplianceDataset(std::move(labels), std::move(components), std::move(*aggregate));
}

ApplianceDataset ApplianceDataset::select_columns(const std::vector<Eigen::Index>& columns) const {
  auto pick = [&](const UsageMatrix& m) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto c = columns[i];
      if (c < 0 || c >= m.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "column index out of range");
      }
      out.col(static_cast<Eigen::Index>(i)) = m.values().col(c);
    }
    return UsageMatrix(std::move(out), m.interval_seconds(), m.start_timestamp());
  };
  std::vector<UsageMatrix> comps;
  comps.reserve(components_.size());
  for (const auto& c : components_) comps.push_back(pick(c));
  return ApplianceDataset(labels_, std::move(comps), pick(aggregate_));
}

std::string to_string(PenaltyMode mode) {
  return mode == PenaltyMode::L1 ? "l1" : "squared_frobenius";
}

PenaltyMode penalty_mode_from_string(const std::string& text) {
  if (text == "l1" || text == "L1") return PenaltyMode::L1;
  if (text == "squared_frobenius" || text == "SquaredFrobenius") return PenaltyMode::SquaredFrobenius;
  throw Error(ErrorCode::InvalidConfig, "unknown penalty mode '" + text + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (n_bases < 1) fail("n_bases must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be a finite non-negative number");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
  if (nnsc_max_iters < 1 || dd_max_iters < 1 || solver_max_iters < 1) {
    fail("iteration limits must be positive");
  }
  if (!(tol > 0.0)) fail("tol must be positive");
}

DisaggModel::DisaggModel(std::vector<std::string> labels, std::vector<Dictionary> recon_bases,
                         std::vector<Dictionary> disc_bases, TrainConfig config)
    : labels_(std::move(labels)),
      recon_bases_(std::move(recon_bases)),
      disc_bases_(std::move(disc_bases)),
      config_(config) {
  if (labels_.empty()) throw Error(ErrorCode::ShapeMismatch, "model needs at least one appliance");
  if (recon_bases_.size() != labels_.size() || disc_bases_.size() != labels_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "model basis count differs from label count");
  }
  window_ = recon_bases_.front().rows();
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (recon_bases_[k].rows() != window_ || disc_bases_[k].rows() != window_) {
      throw Error(ErrorCode::ShapeMismatch, "model dictionaries disagree on window length");
    }
    if (recon_bases_[k].n() != disc_bases_[k].n()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "reconstruction and discriminative bases differ in size for " + labels_[k]);
    }
  }
}

Matrix concat_bases(const std::vector<Dictionary>& bases) {
  if (bases.empty()) return Matrix();
  Eigen::Index total = 0;
  for (const auto& b : bases) total += b.n();
  Matrix out(bases.front().rows(), total);
  Eigen::Index offset = 0;
  for (const auto& b : bases) {
    if (b.rows() != out.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "bases disagree on row count");
    }
    out.middleCols(offset, b.n()) = b.values();
    offset += b.n();
  }
  return out;
}

std::vector<Eigen::Index> block_sizes(const std::vector<Dictionary>& bases) {
  std::vector<Eigen::Index> sizes;
  sizes.reserve(bases.size());
  for (const auto& b : bases) sizes.push_back(b.n());
  return sizes;
}

std::vector<Matrix> split_rows(const Matrix& stacked, const std::vector<Eigen::Index>& sizes) {
  std::vector<Matrix> out;
  out.reserve(sizes.size());
  Eigen::Index offset = 0;
  for (auto s : sizes) {
    if (offset + s > stacked.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "block sizes exceed stacked row count");
    }
    out.emplace_back(stacked.middleRows(offset, s));
    offset += s;
  }
  if (offset != stacked.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "block sizes do not cover stacked rows");
  }
  return out;
}

}  // namespace ddsc
