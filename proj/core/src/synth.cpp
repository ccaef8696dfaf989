#include "ddsc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "ddsc/dataio.hpp"
#include "ddsc/rng.hpp"

namespace ddsc::synth {

using nlohmann::json;

namespace {

constexpr std::int64_t kWeekSeconds = 7 * 86400;

void spec_fail(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

template <class T>
void read_field(const json& node, const char* key, T& field) {
  if (node.contains(key)) field = node.at(key).get<T>();
}

// Diurnal gate in [-1, 1], peaking at `peak_hour`.
double diurnal(int hour_of_day, double peak_hour) {
  return std::cos(2.0 * std::numbers::pi * (hour_of_day - peak_hour) / 24.0);
}

enum Category { kAir = 0, kFurnace, kDishwasher, kRefrigerator, kOther, kCategories };

struct HouseTraits {
  double scale[kCategories];
  double air_peak_hour;
  int fridge_phase;
};

HouseTraits draw_house(const ProfileSpec& spec, std::uint64_t seed, int house) {
  CounterRng rng(seed, stream_id("synth-house", static_cast<std::uint64_t>(house)));
  HouseTraits t{};
  for (double& s : t.scale) s = 1.0 + spec.house_spread * (2.0 * rng.uniform() - 1.0);
  t.air_peak_hour = 13.0 + 4.0 * rng.uniform();
  t.fridge_phase = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.refrigerator.period_hours)));
  return t;
}

void fill_week(const ProfileSpec& spec, const HouseTraits& traits, std::uint64_t seed, int house, int week,
               std::vector<Matrix>& comps, Eigen::Index col) {
  const int T = spec.window_hours;
  const auto h = static_cast<std::uint64_t>(house);
  const auto w = static_cast<std::uint64_t>(week);

  // Seasonal position: 1 = peak summer, 0 = deep winter.
  CounterRng season_rng(seed, stream_id("synth-season", h, w));
  const double season = season_rng.uniform();

  {
    const auto& p = spec.refrigerator;
    CounterRng rng(seed, stream_id("synth-refrigerator", h, w));
    const int half = std::max(1, p.period_hours / 2);
    for (int t = 0; t < T; ++t) {
      const bool on = (t + traits.fridge_phase) % p.period_hours < half;
      const double level = on ? p.on_kwh : p.off_kwh;
      comps[kRefrigerator](t, col) =
          traits.scale[kRefrigerator] * level * (1.0 + p.jitter * (2.0 * rng.uniform() - 1.0));
    }
  }
  {
    const auto& p = spec.dishwasher;
    CounterRng rng(seed, stream_id("synth-dishwasher", h, w));
    for (int day = 0; day * 24 < T; ++day) {
      const int span = p.runs_per_day_max - p.runs_per_day_min + 1;
      const int runs = p.runs_per_day_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
      for (int r = 0; r < runs; ++r) {
        const int start = day * 24 + 7 + static_cast<int>(rng.below(16));
        const double energy = traits.scale[kDishwasher] * (p.kwh_min + (p.kwh_max - p.kwh_min) * rng.uniform());
        for (int k = 0; k < p.run_hours; ++k) {
          if (start + k < T) comps[kDishwasher](start + k, col) += energy / p.run_hours;
        }
      }
    }
  }
  {
    const auto& air = spec.air;
    const auto& fur = spec.furnace;
    CounterRng rng(seed, stream_id("synth-hvac", h, w));
    const double air_season = air.winter_scale + (air.summer_scale - air.winter_scale) * season;
    const double fur_season = fur.summer_scale + (fur.winter_scale - fur.summer_scale) * (1.0 - season);
    double day_factor = 1.0;
    for (int t = 0; t < T; ++t) {
      if (t % 24 == 0) day_factor = 0.6 + 0.6 * rng.uniform();
      const double g = diurnal(t % 24, traits.air_peak_hour);
      const double a = g > air.gate ? (g - air.gate) / (1.0 - air.gate) : 0.0;
      const double f = -g > fur.gate ? (-g - fur.gate) / (1.0 - fur.gate) : 0.0;
      comps[kAir](t, col) = traits.scale[kAir] * air.peak_kwh * air_season * day_factor * a;
      comps[kFurnace](t, col) = traits.scale[kFurnace] * fur.peak_kwh * fur_season * (1.6 - day_factor) * f;
    }
  }
  {
    const auto& p = spec.other;
    CounterRng rng(seed, stream_id("synth-other", h, w));
    double e = p.noise_kwh * rng.uniform();
    for (int t = 0; t < T; ++t) {
      e = p.smoothing * e + (1.0 - p.smoothing) * p.noise_kwh * rng.uniform();
      comps[kOther](t, col) = traits.scale[kOther] * (p.base_kwh + e);
    }
  }
}

}  // namespace

const std::vector<std::string>& category_labels() {
  static const std::vector<std::string> labels{"air", "furnace", "dishwasher", "refrigerator", "other"};
  return labels;
}

void ProfileSpec::validate() const {
  if (houses < 2) spec_fail("houses must be >= 2");
  if (weeks < 1) spec_fail("weeks must be >= 1");
  if (window_hours < 1) spec_fail("window_hours must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) spec_fail("split_ratio must be in (0, 1)");
  if (!(house_spread >= 0.0 && house_spread < 1.0)) spec_fail("house_spread must be in [0, 1)");
  if (refrigerator.period_hours < 1) spec_fail("refrigerator.period_hours must be >= 1");
  if (refrigerator.on_kwh < 0 || refrigerator.off_kwh < 0) spec_fail("refrigerator levels must be >= 0");
  if (!(refrigerator.jitter >= 0.0 && refrigerator.jitter <= 1.0)) spec_fail("refrigerator.jitter must be in [0, 1]");
  if (dishwasher.runs_per_day_min < 0 || dishwasher.runs_per_day_max < dishwasher.runs_per_day_min) {
    spec_fail("dishwasher run counts invalid");
  }
  if (dishwasher.run_hours < 1) spec_fail("dishwasher.run_hours must be >= 1");
  if (dishwasher.kwh_min < 0 || dishwasher.kwh_max < dishwasher.kwh_min) spec_fail("dishwasher energy range invalid");
  if (air.peak_kwh < 0 || air.summer_scale < 0 || air.winter_scale < 0) spec_fail("air amplitudes must be >= 0");
  if (!(air.gate >= -1.0 && air.gate < 1.0)) spec_fail("air.gate must be in [-1, 1)");
  if (furnace.peak_kwh < 0 || furnace.summer_scale < 0 || furnace.winter_scale < 0) {
    spec_fail("furnace amplitudes must be >= 0");
  }
  if (!(furnace.gate >= -1.0 && furnace.gate < 1.0)) spec_fail("furnace.gate must be in [-1, 1)");
  if (other.base_kwh < 0 || other.noise_kwh < 0) spec_fail("other amplitudes must be >= 0");
  if (!(other.smoothing >= 0.0 && other.smoothing < 1.0)) spec_fail("other.smoothing must be in [0, 1)");
}

ProfileSpec spec_from_json(const std::string& text) {
  ProfileSpec s;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) spec_fail("profile spec must be a JSON object");
    read_field(doc, "houses", s.houses);
    read_field(doc, "weeks", s.weeks);
    read_field(doc, "window_hours", s.window_hours);
    read_field(doc, "split_ratio", s.split_ratio);
    read_field(doc, "house_spread", s.house_spread);
    if (doc.contains("start")) s.start = parse_iso8601_utc(doc["start"].get<std::string>());
    if (const auto it = doc.find("refrigerator"); it != doc.end()) {
      read_field(*it, "period_hours", s.refrigerator.period_hours);
      read_field(*it, "on_kwh", s.refrigerator.on_kwh);
      read_field(*it, "off_kwh", s.refrigerator.off_kwh);
      read_field(*it, "jitter", s.refrigerator.jitter);
    }
    if (const auto it = doc.find("dishwasher"); it != doc.end()) {
      read_field(*it, "runs_per_day_min", s.dishwasher.runs_per_day_min);
      read_field(*it, "runs_per_day_max", s.dishwasher.runs_per_day_max);
      read_field(*it, "run_hours", s.dishwasher.run_hours);
      read_field(*it, "kwh_min", s.dishwasher.kwh_min);
      read_field(*it, "kwh_max", s.dishwasher.kwh_max);
    }
    if (const auto it = doc.find("air"); it != doc.end()) {
      read_field(*it, "peak_kwh", s.air.peak_kwh);
      read_field(*it, "gate", s.air.gate);
      read_field(*it, "summer_scale", s.air.summer_scale);
      read_field(*it, "winter_scale", s.air.winter_scale);
    }
    if (const auto it = doc.find("furnace"); it != doc.end()) {
      read_field(*it, "peak_kwh", s.furnace.peak_kwh);
      read_field(*it, "gate", s.furnace.gate);
      read_field(*it, "summer_scale", s.furnace.summer_scale);
      read_field(*it, "winter_scale", s.furnace.winter_scale);
    }
    if (const auto it = doc.find("other"); it != doc.end()) {
      read_field(*it, "base_kwh", s.other.base_kwh);
      read_field(*it, "noise_kwh", s.other.noise_kwh);
      read_field(*it, "smoothing", s.other.smoothing);
    }
  } catch (const json::exception& e) {
    spec_fail(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw;
    spec_fail(e.what());
  }
  s.validate();
  return s;
}

std::string spec_to_json(const ProfileSpec& s) {
  json doc{{"houses", s.houses},
           {"weeks", s.weeks},
           {"window_hours", s.window_hours},
           {"start", format_iso8601_utc(s.start)},
           {"split_ratio", s.split_ratio},
           {"house_spread", s.house_spread},
           {"refrigerator",
            {{"period_hours", s.refrigerator.period_hours},
             {"on_kwh", s.refrigerator.on_kwh},
             {"off_kwh", s.refrigerator.off_kwh},
             {"jitter", s.refrigerator.jitter}}},
           {"dishwasher",
            {{"runs_per_day_min", s.dishwasher.runs_per_day_min},
             {"runs_per_day_max", s.dishwasher.runs_per_day_max},
             {"run_hours", s.dishwasher.run_hours},
             {"kwh_min", s.dishwasher.kwh_min},
             {"kwh_max", s.dishwasher.kwh_max}}},
           {"air",
            {{"peak_kwh", s.air.peak_kwh},
             {"gate", s.air.gate},
             {"summer_scale", s.air.summer_scale},
             {"winter_scale", s.air.winter_scale}}},
           {"furnace",
            {{"peak_kwh", s.furnace.peak_kwh},
             {"gate", s.furnace.gate},
             {"summer_scale", s.furnace.summer_scale},
             {"winter_scale", s.furnace.winter_scale}}},
           {"other",
            {{"base_kwh", s.other.base_kwh}, {"noise_kwh", s.other.noise_kwh}, {"smoothing", s.other.smoothing}}}};
  return doc.dump(2) + "\n";
}

GeneratedData generate(const ProfileSpec& spec_in, int houses, int weeks, std::uint64_t seed) {
  ProfileSpec spec = spec_in;
  spec.houses = houses;
  spec.weeks = weeks;
  spec.validate();

  const Eigen::Index T = spec.window_hours;
  const Eigen::Index M = static_cast<Eigen::Index>(houses) * weeks;
  std::vector<Matrix> comps(kCategories, Matrix::Zero(T, M));
  std::vector<std::string> column_houses;
  std::vector<std::int64_t> column_starts;
  Eigen::Index col = 0;
  for (int h = 0; h < houses; ++h) {
    const HouseTraits traits = draw_house(spec, seed, h);
    char id[32];
    std::snprintf(id, sizeof id, "house_%03d", h);
    for (int w = 0; w < weeks; ++w, ++col) {
      fill_week(spec, traits, seed, h, w, comps, col);
      column_houses.emplace_back(id);
      column_starts.push_back(spec.start + static_cast<std::int64_t>(w) * kWeekSeconds);
    }
  }
  std::vector<UsageMatrix> usage;
  for (auto& c : comps) usage.emplace_back(std::move(c), 3600, spec.start);
  return {make_dataset(category_labels(), std::move(usage)), std::move(column_houses), std::move(column_starts)};
}

GeneratedData generate(const ProfileSpec& spec, std::uint64_t seed) {
  return generate(spec, spec.houses, spec.weeks, seed);
}

DatasetBundle generate_bundle(const ProfileSpec& spec, std::uint64_t seed) {
  const auto gen = generate(spec, seed);
  const auto [train_houses, test_houses] =
      split_houses(static_cast<std::size_t>(spec.houses), spec.split_ratio, seed);

  auto part = [&](const std::vector<std::size_t>& houses) {
    std::vector<Eigen::Index> cols;
    SplitPart p{gen.data, {}, {}, {}};
    for (auto h : houses) {
      for (int w = 0; w < spec.weeks; ++w) {
        const auto c = static_cast<Eigen::Index>(h) * spec.weeks + w;
        cols.push_back(c);
        p.column_houses.push_back(gen.column_houses[static_cast<std::size_t>(c)]);
        p.column_starts.push_back(gen.column_starts[static_cast<std::size_t>(c)]);
      }
      p.houses.push_back(gen.column_houses[h * static_cast<std::size_t>(spec.weeks)]);
    }
    p.data = gen.data.select_columns(cols);
    return p;
  };
  DatasetBundle bundle;
  bundle.labels = category_labels();
  bundle.interval_seconds = 3600;
  bundle.train = part(train_houses);
  bundle.test = part(test_houses);
  return bundle;
}

Matrix oracle_solve(const Matrix& X, const Matrix& B, double lambda, PenaltyMode mode, int iterations) {
  if (X.rows() > kOracleMaxRows || X.cols() > kOracleMaxCols || B.cols() > kOracleMaxBases) {
    throw Error(ErrorCode::DimensionTooLarge, "oracle_solve is limited to X <= 8x8 and B <= 8x12");
  }
  if (X.rows() != B.rows()) throw Error(ErrorCode::DimensionMismatch, "X and B row counts differ");
  const std::size_t T = static_cast<std::size_t>(B.rows());
  const std::size_t n = static_cast<std::size_t>(B.cols());
  const std::size_t M = static_cast<std::size_t>(X.cols());

  // Plain row-major copies; no Eigen arithmetic below.
  std::vector<double> b(T * n);
  std::vector<double> x(T * M);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < n; ++j) b[t * n + j] = B(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    for (std::size_t m = 0; m < M; ++m) x[t * M + m] = X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m));
  }
  double lipschitz = 0.0;
  for (double v : b) lipschitz += v * v;
  if (mode == PenaltyMode::SquaredFrobenius) lipschitz += 2.0 * lambda;
  if (lipschitz <= 0.0) lipschitz = 1.0;

  std::vector<double> a(n * M, 0.0);
  std::vector<double> resid(T * M);
  std::vector<double> grad(n * M);
  for (int k = 0; k < iterations; ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t m = 0; m < M; ++m) {
        double s = -x[t * M + m];
        for (std::size_t j = 0; j < n; ++j) s += b[t * n + j] * a[j * M + m];
        resid[t * M + m] = s;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t m = 0; m < M; ++m) {
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t) s += b[t * n + j] * resid[t * M + m];
        s += mode == PenaltyMode::L1 ? lambda : 2.0 * lambda * a[j * M + m];
        grad[j * M + m] = s;
      }
    }
    const double step = 1.0 / (lipschitz * (1.0 + static_cast<double>(k) / iterations));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::max(0.0, a[i] - step * grad[i]);
  }

  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(M));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m < M; ++m) out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = a[j * M + m];
  }
  return out;
}

double oracle_objective(const Matrix& X, const Matrix& B, const Matrix& A, double lambda, PenaltyMode mode) {
  double fit = 0.0;
  for (Eigen::Index t = 0; t < X.rows(); ++t) {
    for (Eigen::Index m = 0; m < X.cols(); ++m) {
      double s = -X(t, m);
      for (Eigen::Index j = 0; j < B.cols(); ++j) s += B(t, j) * A(j, m);
      fit += s * s;
    }
  }
  double pen = 0.0;
  for (Eigen::Index j = 0; j < A.rows(); ++j) {
    for (Eigen::Index m = 0; m < A.cols(); ++m) pen += mode == PenaltyMode::L1 ? A(j, m) : A(j, m) * A(j, m);
  }
  return 0.5 * fit + lambda * pen;
}

}  // namespace ddsc::synth
