#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hypo {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent user input (config files, grid specs, parameters).
struct ConfigError : Error {
  using Error::Error;
};

/// A model evaluator returned a non-finite value, or a density was invalid.
struct EvaluationError : Error {
  using Error::Error;
};

/// Iteration failed to reach the requested tolerance.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual;
};

/// A time stepper produced NaN or lost mass catastrophically.
struct InstabilityError : Error {
  using Error::Error;
};

/// Metric block aa^T+zz^T is singular (z1 = 0).
struct SingularMetricError : Error {
  using Error::Error;
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HYPO_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

/// Static-chunk parallel loop. body(begin, end, chunk_index) runs on [begin,end).
/// Chunk boundaries depend only on (n, threads), so any reduction keyed on
/// chunk_index is reproducible across thread counts when merged sequentially.
inline void parallel_chunks(std::int64_t n, int threads,
                            const std::function<void(std::int64_t, std::int64_t, int)>& body) {
  if (n <= 0) return;
  int t = threads < 1 ? 1 : static_cast<int>(std::min<std::int64_t>(threads, n));
  if (t == 1) {
    body(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::int64_t chunk = (n + t - 1) / t;
  for (int c = 0; c < t; ++c) {
    std::int64_t b = c * chunk;
    std::int64_t e = std::min<std::int64_t>(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e, c] { body(b, e, c); });
  }
  for (auto& th : pool) th.join();
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(lo + i * h);
  out.back() = hi;
  return out;
}

}  // namespace hypo
