#pragma once

#include <cstdint>

namespace ddsc {

/// Counter-based generator: output i of stream s under seed k is a pure
/// function of (k, s, i). Streams never share state, so independent jobs
/// draw reproducible values regardless of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1].
  double uniform_open_closed() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal (Box-Muller).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives a stream id from a textual tag plus indices.
std::uint64_t stream_id(const char* tag, std::uint64_t a = 0, std::uint64_t b = 0) noexcept;

}  // namespace ddsc
