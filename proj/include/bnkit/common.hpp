#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bnkit {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural problems: unknown nodes, cycles, malformed graphs.
class graph_error : public error {
 public:
  using error::error;
};

// Bad arguments to an otherwise valid call (overlapping sets, k > n, ...).
class argument_error : public error {
 public:
  using error::error;
};

// Schema/data mismatches, CSV problems, missing columns.
class data_error : public error {
 public:
  using error::error;
};

// Run-configuration file problems; message carries the line number.
class config_error : public error {
 public:
  using error::error;
};

// Parameter estimation failures: empty configurations, degenerate designs.
class fit_error : public error {
 public:
  using error::error;
};

class transform_error : public error {
 public:
  using error::error;
};

inline constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based stream derivation: replicate i of a run seeded with s gets
// derive_seed(s, i), so parallel and sequential execution see the same streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) + stream);
}

// mt19937_64 raw output is fully specified by the standard; the distribution
// adaptors are not. Rng keeps every draw on the specified path so identical
// seeds give identical streams on any toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased draw from [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw argument_error("Rng::below: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Runs body(0..n-1) on up to `threads` workers. Callers write results into
// pre-sized slots by index, so the schedule never affects the outcome.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bnkit
