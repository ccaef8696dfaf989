#pragma once

#include <atomic>
#include <cstring>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "ddsc/rng.hpp"
#include "ddsc/types.hpp"

namespace ddsc::test {

/// Entries uniform on [0, scale), drawn from a dedicated stream.
inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed, stream_id("test-matrix", static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(cols)));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.uniform();
  }
  return m;
}

/// Non-negative matrix with unit-norm columns.
inline Matrix random_unit_columns(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Matrix m = random_matrix(rows, cols, seed);
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j) /= m.col(j).norm();
  return m;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ddsc_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline bool bit_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 || std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace ddsc::test

namespace ddsc::test {

/// Exact minimizer of 0.5*||x - B a||^2 + penalty(a) over a >= 0 for tiny n,
/// found by enumerating active sets and keeping the feasible KKT point with
/// the lowest objective. Independent of every library solver.
inline Vector enumerate_active_sets(const Vector& x, const Matrix& B, double lambda, bool l1) {
  const Eigen::Index n = B.cols();
  const Matrix G = B.transpose() * B;
  const Vector c = B.transpose() * x;
  auto objective = [&](const Vector& a) {
    const double pen = l1 ? lambda * a.sum() : lambda * a.squaredNorm();
    return 0.5 * (x - B * a).squaredNorm() + pen;
  };
  Vector best = Vector::Zero(n);
  double best_obj = objective(best);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (mask & (1u << j)) s.push_back(j);
    }
    const auto k = static_cast<Eigen::Index>(s.size());
    Matrix Gs(k, k);
    Vector rhs(k);
    for (Eigen::Index p = 0; p < k; ++p) {
      rhs(p) = l1 ? c(s[p]) - lambda : c(s[p]);
      for (Eigen::Index q = 0; q < k; ++q) Gs(p, q) = G(s[p], s[q]) + (!l1 && p == q ? 2 * lambda : 0.0);
    }
    Eigen::FullPivLU<Matrix> lu(Gs);
    if (!lu.isInvertible()) continue;
    const Vector as = lu.solve(rhs);
    if ((as.array() < 0).any()) continue;
    Vector a = Vector::Zero(n);
    for (Eigen::Index p = 0; p < k; ++p) a(s[p]) = as(p);
    const double obj = objective(a);
    if (obj < best_obj) {
      best_obj = obj;
      best = a;
    }
  }
  return best;
}

}  // namespace ddsc::test
