#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace layerpot {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown names, malformed grids, unreadable files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A curve or density could not be built as requested.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class SelfIntersectionError : public ConstructionError {
 public:
  using ConstructionError::ConstructionError;
};

class ClosureError : public ConstructionError {
 public:
  using ConstructionError::ConstructionError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

// Neumaier compensated accumulator. Summation order is the caller's order,
// so results are reproducible as long as the order is fixed.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if (magnitude(sum_) >= magnitude(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double magnitude(double v) { return v < 0 ? -v : v; }
  static double magnitude(const cplx& v) { return std::abs(v.real()) + std::abs(v.imag()); }
  T sum_{};
  T comp_{};
};

// Principal angle of (b - xi) relative to (a - xi), in (-pi, pi].
inline double angle_increment(cplx a, cplx b, cplx xi) {
  const cplx p = a - xi;
  const cplx q = b - xi;
  const double cr = p.real() * q.imag() - p.imag() * q.real();
  const double dt = p.real() * q.real() + p.imag() * q.imag();
  return std::atan2(cr, dt);
}

inline double wrap_to_pi(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - kPi;
}

// Parallelism degree for pure sweeps. LAYERPOT_THREADS caps the request.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, n) over a fixed static partition. Callers write
// into preallocated per-index slots, so results never depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

std::vector<double> dyadic_grid(double top, int count);  // top, top/2, ..., count values
std::vector<double> log_grid(double lo, double hi, int points_per_octave);

}  // namespace layerpot
