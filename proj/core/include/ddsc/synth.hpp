#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddsc/bundle.hpp"
#include "ddsc/types.hpp"

namespace ddsc::synth {

struct RefrigeratorProfile {
  int period_hours = 2;
  double on_kwh = 0.12;
  double off_kwh = 0.03;
  double jitter = 0.15;
};

struct DishwasherProfile {
  int runs_per_day_min = 1;
  int runs_per_day_max = 2;
  int run_hours = 2;
  double kwh_min = 0.8;
  double kwh_max = 1.4;
};

struct AirProfile {
  double peak_kwh = 2.0;
  double gate = 0.3;
  double summer_scale = 1.0;
  double winter_scale = 0.1;
};

struct FurnaceProfile {
  double peak_kwh = 1.2;
  double gate = 0.3;
  double summer_scale = 0.05;
  double winter_scale = 1.0;
};

struct OtherProfile {
  double base_kwh = 0.25;
  double noise_kwh = 0.3;
  double smoothing = 0.7;
};

/// Declarative description of a synthetic neighbourhood.
struct ProfileSpec {
  int houses = 40;
  int weeks = 1;
  int window_hours = 168;
  /// UTC epoch seconds of the first window (a Monday 00:00).
  std::int64_t start = 1546819200;  // 2019-01-07T00:00:00Z
  double split_ratio = 0.7;
  /// Per-house multiplicative spread of every appliance amplitude.
  double house_spread = 0.3;
  RefrigeratorProfile refrigerator;
  DishwasherProfile dishwasher;
  AirProfile air;
  FurnaceProfile furnace;
  OtherProfile other;

  /// Throws InvalidSpec.
  void validate() const;
};

/// Category order of generated datasets.
const std::vector<std::string>& category_labels();

ProfileSpec spec_from_json(const std::string& text);
std::string spec_to_json(const ProfileSpec& spec);

struct GeneratedData {
  ApplianceDataset data;
  std::vector<std::string> column_houses;
  std::vector<std::int64_t> column_starts;
};

/// houses * weeks columns, house-major. Deterministic in (spec, seed).
GeneratedData generate(const ProfileSpec& spec, int houses, int weeks, std::uint64_t seed);
GeneratedData generate(const ProfileSpec& spec, std::uint64_t seed);

/// Generated data split 70/30 (spec.split_ratio) by house.
DatasetBundle generate_bundle(const ProfileSpec& spec, std::uint64_t seed);

inline constexpr Eigen::Index kOracleMaxRows = 8;
inline constexpr Eigen::Index kOracleMaxCols = 8;
inline constexpr Eigen::Index kOracleMaxBases = 12;

/// Reference solver for small non-negative sparse-coding problems:
/// projected gradient descent with diminishing step 1/(L(1 + k/iters)),
/// L = ||B||_F^2 (+ 2 lambda for the squared-Frobenius penalty). Shares no
/// code with the coordinate-descent solver.
Matrix oracle_solve(const Matrix& X, const Matrix& B, double lambda, PenaltyMode mode, int iterations = 100000);

/// Objective evaluated with plain loops, for comparisons against the oracle.
double oracle_objective(const Matrix& X, const Matrix& B, const Matrix& A, double lambda, PenaltyMode mode);

}  // namespace ddsc::synth
