#pragma once

#include "layerpot/common.hpp"

namespace layerpot {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// {u in [0,1] : |a + u (b - a) - xi| <= r}; empty result when width < 0.
// r = +inf gives [0, 1].
Interval disk_interval(cplx a, cplx b, cplx xi, double r);

// Parameter intervals of segment a->b inside delta < |t - xi| <= eps.
// delta = 0 excludes nothing. Returns the number of intervals written (0..2).
int clip_annulus(cplx a, cplx b, cplx xi, double delta, double eps, Interval out[2]);

// Exact integral of (ga + (gb - ga) u) / (t - z) dt along the segment a->b,
// t = a + u (b - a). z must not lie on the segment.
cplx segment_cauchy(cplx a, cplx b, double ga, double gb, cplx z);

// Shortest distance from z to the closed segment [a, b].
double point_segment_distance(cplx z, cplx a, cplx b);

// True when xi lies on the closed segment within tolerance tol.
bool on_segment(cplx xi, cplx a, cplx b, double tol);

}  // namespace layerpot
