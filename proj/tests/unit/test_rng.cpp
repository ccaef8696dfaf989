#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>

#include "ddsc/parallel.hpp"
#include "ddsc/rng.hpp"

using namespace ddsc;

TEST_CASE("counter rng is a pure function of seed, stream and position") {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.counter() == 100);

  CounterRng c(42, 8);
  CounterRng d(43, 7);
  CounterRng e(42, 7);
  int same_stream = 0;
  int same_seed = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = e.next_u64();
    same_stream += c.next_u64() == x;
    same_seed += d.next_u64() == x;
  }
  CHECK(same_stream == 0);
  CHECK(same_seed == 0);
}

TEST_CASE("uniform ranges") {
  CounterRng rng(1, 1);
  double lo = 1;
  double hi = 0;
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform_open_closed();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    const double v = rng.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("below stays in range and covers it") {
  CounterRng rng(3, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("normal draws have unit scale") {
  CounterRng rng(5, 0);
  double s = 0;
  double s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.05);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stream ids separate tags and indices") {
  std::set<std::uint64_t> ids;
  for (const char* tag : {"nnsc", "ddsc", "split"}) {
    for (std::uint64_t a = 0; a < 10; ++a) ids.insert(stream_id(tag, a));
  }
  CHECK(ids.size() == 30);
  CHECK(stream_id("nnsc", 1, 2) != stream_id("nnsc", 2, 1));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("worker cap honours DDSC_THREADS") {
  ::setenv("DDSC_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  ::setenv("DDSC_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("DDSC_THREADS");
  CHECK(worker_count() >= 1);
}
