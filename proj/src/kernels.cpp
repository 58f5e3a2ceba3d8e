#include "layerpot/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace layerpot {

Interval disk_interval(cplx a, cplx b, cplx xi, double r) {
  if (std::isinf(r)) return {0.0, 1.0};
  const cplx d = b - a;
  const cplx p = a - xi;
  const double A = std::norm(d);
  const double B = 2.0 * (d.real() * p.real() + d.imag() * p.imag());
  const double C = std::norm(p) - r * r;
  if (A == 0.0) return C <= 0.0 ? Interval{0.0, 1.0} : Interval{1.0, 0.0};
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return {1.0, 0.0};
  const double sq = std::sqrt(disc);
  double u1, u2;
  if (B >= 0.0) {
    const double q = -0.5 * (B + sq);
    u1 = q / A;
    u2 = (q != 0.0) ? C / q : 0.0;
  } else {
    const double q = -0.5 * (B - sq);
    u1 = C / q;
    u2 = q / A;
  }
  if (u1 > u2) std::swap(u1, u2);
  return {std::max(0.0, u1), std::min(1.0, u2)};
}

int clip_annulus(cplx a, cplx b, cplx xi, double delta, double eps, Interval out[2]) {
  const Interval in = disk_interval(a, b, xi, eps);
  if (in.width() <= 0.0) return 0;
  if (!(delta > 0.0)) {
    out[0] = in;
    return 1;
  }
  const Interval ex = disk_interval(a, b, xi, delta);
  if (ex.width() <= 0.0 || ex.hi <= in.lo || ex.lo >= in.hi) {
    out[0] = in;
    return 1;
  }
  int n = 0;
  if (ex.lo > in.lo) out[n++] = {in.lo, ex.lo};
  if (ex.hi < in.hi) out[n++] = {ex.hi, in.hi};
  return n;
}

cplx segment_cauchy(cplx a, cplx b, double ga, double gb, cplx z) {
  const cplx d = b - a;
  const cplx w = (a - z) / d;
  const double dg = gb - ga;
  cplx L, rest;
  if (std::abs(w) > 4.0) {
    // log(1 + x) and 1 - w log(1 + 1/w) as power series in x = 1/w.
    const cplx x = 1.0 / w;
    cplx pw = x;
    L = 0.0;
    rest = 0.0;
    for (int k = 1; k < 60; ++k) {
      const cplx tl = pw / double(k);
      const cplx tr = pw / double(k + 1);
      if (k % 2 == 1) {
        L += tl;
        rest += tr;
      } else {
        L -= tl;
        rest -= tr;
      }
      if (std::abs(tl) < 1e-18 * std::abs(L)) break;
      pw *= x;
    }
  } else {
    L = std::log((b - z) / (a - z));
    rest = 1.0 - w * L;
  }
  return ga * L + dg * rest;
}

double point_segment_distance(cplx z, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double u = ((z - a) * std::conj(d)).real() / len2;
  u = std::clamp(u, 0.0, 1.0);
  return std::abs(z - (a + u * d));
}

bool on_segment(cplx xi, cplx a, cplx b, double tol) { return point_segment_distance(xi, a, b) <= tol; }

}  // namespace layerpot
