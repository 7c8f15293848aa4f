#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace accel::numeric {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

/// arccosh(1 + t) for t >= 0, accurate when t is tiny.
inline double acosh1p(double t) { return std::log1p(t + std::sqrt(t * (2.0 + t))); }

/// arccos(1 - t) for t in [0, 2], accurate when t is tiny.
inline double acos1m(double t) { return 2.0 * std::asin(std::sqrt(0.5 * t)); }

/// Neumaier-compensated sum. Deterministic for a fixed input order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Fixed 17-significant-digit rendering used by every CSV writer.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Evenly spaced points on [lo, hi] with both endpoints exact.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return v;
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker, so results written to slot i are
/// independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned workers = threads == 0 ? hw : std::min(threads, hw);
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace accel::numeric
