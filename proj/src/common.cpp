#include "layerpot/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace layerpot {

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("LAYERPOT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> dyadic_grid(double top, int count) {
  std::vector<double> out;
  out.reserve(std::max(0, count));
  double v = top;
  for (int k = 0; k < count; ++k) {
    out.push_back(v);
    v *= 0.5;
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points_per_octave) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi >= lo) || points_per_octave < 1) return out;
  const double octaves = std::log2(hi / lo);
  const int m = std::max(1, static_cast<int>(std::ceil(octaves * points_per_octave)));
  out.reserve(m + 1);
  for (int k = 0; k <= m; ++k) out.push_back(lo * std::exp2(octaves * k / m));
  out.back() = hi;
  return out;
}

}  // namespace layerpot
