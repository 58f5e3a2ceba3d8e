#include "layerpot/arg_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "layerpot/kernels.hpp"

namespace layerpot {

namespace {

constexpr double kMaxSubtended = kPi / 64.0;

double on_segment_tol(cplx a, cplx b, cplx xi) { return 1e-12 * std::abs(b - a) + 4e-16 * std::abs(xi); }

cplx lerp(cplx a, cplx b, double u) { return u == 0.0 ? a : (u == 1.0 ? b : a + u * (b - a)); }

// Refined midpoint rule. The subdivision of a segment depends only on the
// segment and xi, plus extra bisection of pieces straddling the two radii, so
// splitting an annulus into shells gives the same total up to those tiny pieces.
struct MidpointStieltjes {
  const Density& g;
  cplx xi;
  double gxi;
  double delta;
  double eps;
  CompensatedSum<double>& acc;

  void run(const Curve& c, std::size_t i, double ua, double ub, int depth) {
    const cplx a = c.vertex(i), b = c.vertex(i + 1);
    const cplx p = lerp(a, b, ua), q = lerp(a, b, ub);
    const double dmin = point_segment_distance(xi, p, q);
    const double dmax = std::max(std::abs(p - xi), std::abs(q - xi));
    if (dmin > eps || dmax <= delta) return;
    const double um = 0.5 * (ua + ub);
    const cplx m = lerp(a, b, um);
    const double chord = std::abs(q - p);
    const double dm = std::abs(m - xi);
    const bool straddles = (dmin <= delta && dmax > delta) || (dmin <= eps && dmax > eps);
    const bool coarse = std::abs(angle_increment(p, q, xi)) > kMaxSubtended || chord > dm / 8.0;
    if (depth < 80 && (coarse || (straddles && chord > 1e-9 * dm))) {
      run(c, i, ua, um, depth + 1);
      run(c, i, um, ub, depth + 1);
      return;
    }
    Interval parts[2];
    const int n = clip_annulus(p, q, xi, delta, eps, parts);
    for (int k = 0; k < n; ++k) {
      const double u0 = ua + parts[k].lo * (ub - ua), u1 = ua + parts[k].hi * (ub - ua);
      const cplx x0 = lerp(a, b, u0), x1 = lerp(a, b, u1);
      if (on_segment(xi, x0, x1, on_segment_tol(a, b, xi))) continue;
      const double uc = 0.5 * (u0 + u1);
      const double s = c.arc_coords()[i] + uc * c.segment_length(i);
      acc.add((g(lerp(a, b, uc), s) - gxi) * angle_increment(x0, x1, xi));
    }
  }
};

}  // namespace

std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged:
      return "converged";
    case TraceStatus::Divergent:
      return "DIVERGENT";
    default:
      return "inconclusive";
  }
}

TraceStatus classify_trace(const std::vector<double>& deltas, const std::vector<double>& values, double resolved_scale,
                           const ConvergencePolicy& policy) {
  const std::size_t n = std::min(deltas.size(), values.size());
  if (n < 2) return TraceStatus::Inconclusive;
  std::size_t last = n - 1;
  if (resolved_scale > 0.0)
    while (last > 0 && deltas[last] < resolved_scale) --last;
  const std::size_t w = static_cast<std::size_t>(std::max(2, policy.window));
  // Increments are taken over two levels so that period-two patterns of
  // dyadic constructions do not mask a harmonic trend.
  if (last >= w + 1) {
    bool growing = true;
    double prev_scaled = 0.0;
    for (std::size_t k = last + 1 - w; k <= last && growing; ++k) {
      const double inc = values[k] - values[k - 2];
      if (!(inc > 2.0 * policy.tol)) growing = false;
      const double m = std::max(1.0, std::log2(deltas[0] / deltas[k]));
      const double scaled = m * inc;
      if (k > last + 1 - w && scaled < prev_scaled * (1.0 - 1.0 / (2.0 * m))) growing = false;
      prev_scaled = scaled;
    }
    if (growing) return TraceStatus::Divergent;
  }
  if (std::abs(values[n - 1] - values[n - 2]) < policy.tol) return TraceStatus::Converged;
  return TraceStatus::Inconclusive;
}

ArgBranch track_arg(const Curve& curve, double s_begin, double s_end, cplx xi) {
  if (!(s_end > s_begin)) throw DomainError("track_arg needs s_end > s_begin");
  const double L = curve.length();
  if (s_end - s_begin > L * (1.0 + 1e-12)) throw DomainError("track_arg arc longer than the curve");
  ArgBranch br;
  br.base = xi;
  // Points along the arc: start, interior vertices, end.
  std::vector<std::pair<double, cplx>> pts;
  pts.emplace_back(s_begin, curve.point_at(s_begin));
  const auto& arc = curve.arc_coords();
  for (int lap = 0; lap < 2; ++lap) {
    for (std::size_t k = 0; k < curve.segment_count(); ++k) {
      const double s = arc[k] + lap * L;
      if (s > s_begin && s < s_end) pts.emplace_back(s, curve.vertex(k));
    }
  }
  pts.emplace_back(s_end, curve.point_at(s_end));
  const double scale = std::max(1.0, std::abs(xi));
  double current = std::arg(pts.front().second - xi);
  br.samples.push_back({pts.front().first, current});
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const cplx p = pts[k].second, q = pts[k + 1].second;
    const double sp = pts[k].first, sq = pts[k + 1].first;
    if (point_segment_distance(xi, p, q) <= 1e-13 * scale)
      throw SingularityError("arc passes through the base point; exclude a neighborhood of xi first");
    const double total = angle_increment(p, q, xi);
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(total) / kMaxSubtended)));
    // Subdivide by equal angle so each step subtends at most pi/64.
    double prev_angle = current;
    cplx prev = p;
    for (int j = 1; j <= pieces; ++j) {
      cplx z;
      double frac;
      if (j == pieces) {
        z = q;
        frac = 1.0;
      } else {
        // Point on [p, q] seen from xi at angle arg(p - xi) + j * total / pieces.
        const cplx dir = std::polar(1.0, std::arg(p - xi) + total * j / pieces);
        const cplx d = q - p;
        const cplx w = p - xi;
        const double denom = dir.real() * d.imag() - dir.imag() * d.real();
        frac = std::clamp(-(w.real() * dir.imag() - w.imag() * dir.real()) / denom, 0.0, 1.0);
        z = p + frac * d;
      }
      const double inc = angle_increment(prev, z, xi);
      br.subtended_max = std::max(br.subtended_max, std::abs(inc));
      prev_angle += inc;
      br.samples.push_back({sp + frac * (sq - sp), prev_angle});
      prev = z;
    }
    current = prev_angle;
  }
  return br;
}

std::vector<ArgBranch> track_arg_outside(const Curve& curve, cplx xi, double delta) {
  const double L = curve.length();
  std::vector<ArgBranch> out;
  if (!(delta > 0.0)) throw DomainError("exclusion radius must be positive");
  const NeighborhoodSlice nb = neighborhood(curve, xi, delta);
  if (nb.subarcs.empty()) {
    out.push_back(track_arg(curve, 0.0, L, xi));
    return out;
  }
  const auto& arcs = nb.subarcs;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const double begin = arcs[k].second;
    double end = (k + 1 < arcs.size()) ? arcs[k + 1].first : arcs.front().first + L;
    if (end - begin > 1e-14 * L) out.push_back(track_arg(curve, begin, end, xi));
  }
  return out;
}

double arg_variation(const Curve& curve, cplx xi, double delta, double eps) {
  if (delta < 0.0) throw DomainError("exclusion radius must be non-negative");
  CompensatedSum<double> acc;
  const auto& v = curve.vertices();
  Interval parts[2];
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const int n = clip_annulus(v[i], v[i + 1], xi, delta, eps, parts);
    for (int k = 0; k < n; ++k) {
      const cplx p = lerp(v[i], v[i + 1], parts[k].lo), q = lerp(v[i], v[i + 1], parts[k].hi);
      if (on_segment(xi, p, q, on_segment_tol(v[i], v[i + 1], xi))) continue;
      acc.add(std::abs(angle_increment(p, q, xi)));
    }
  }
  return acc.value();
}

std::vector<double> schedule_deltas(const Curve& curve, cplx xi, const Schedule& schedule) {
  const double d0 = schedule.delta0 > 0.0 ? schedule.delta0 : curve.diameter();
  int count = schedule.count;
  if (count <= 0) {
    // Deep enough to pass below the mesh around xi and the truncation scale.
    const CurveLocation loc = curve.nearest(xi);
    const auto& v = curve.vertices();
    const std::size_t n = curve.segment_count();
    double local = std::numeric_limits<double>::infinity();
    for (std::size_t j : {loc.segment, (loc.segment + 1) % n, (loc.segment + n - 1) % n}) {
      const double la = std::abs(v[j] - xi), lb = std::abs(v[j + 1] - xi);
      if (la > 0) local = std::min(local, la);
      if (lb > 0) local = std::min(local, lb);
    }
    if (curve.resolved_scale() > 0.0) local = std::min(local, curve.resolved_scale());
    count = static_cast<int>(std::ceil(std::log2(d0 / (local / 8.0))));
    count = std::clamp(count, 4, 1100);
  }
  std::vector<double> d(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k <= count; ++k) d[k] = std::ldexp(d0, -k);
  return d;
}

VariationResult total_arg_variation(const Curve& curve, cplx xi, const Schedule& schedule,
                                    const ConvergencePolicy& policy, double eps) {
  Schedule sched = schedule;
  if (!(sched.delta0 > 0.0)) sched.delta0 = std::min(eps, curve.diameter());
  const std::vector<double> deltas = schedule_deltas(curve, xi, sched);
  const int K = static_cast<int>(deltas.size()) - 1;
  const double d0 = deltas[0];
  std::vector<CompensatedSum<double>> full(K + 1), partial(K + 1);
  const auto& v = curve.vertices();
  Interval parts[2];
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const cplx a = v[i], b = v[i + 1];
    const double dmin = point_segment_distance(xi, a, b);
    if (dmin <= on_segment_tol(a, b, xi)) {
      // Straight piece through xi: arg is constant on each side, only the
      // clipped remainder away from the line matters, which is empty.
      continue;
    }
    double dmax = std::max(std::abs(a - xi), std::abs(b - xi));
    double whole = 0.0;
    if (dmax <= eps) {
      whole = std::abs(angle_increment(a, b, xi));
    } else {
      if (dmin > eps) continue;
      dmax = eps;
      const Interval in = disk_interval(a, b, xi, eps);
      if (in.width() > 0.0) whole = std::abs(angle_increment(lerp(a, b, in.lo), lerp(a, b, in.hi), xi));
    }
    int kfull = std::max(0, static_cast<int>(std::ceil(std::log2(d0 / dmin))) - 1);
    while (kfull <= K && deltas[kfull] > dmin) ++kfull;
    if (kfull <= K) full[kfull].add(whole);
    int kstart = std::max(0, static_cast<int>(std::floor(std::log2(d0 / dmax))) - 1);
    while (kstart <= K && deltas[kstart] >= dmax) ++kstart;
    for (int k = kstart; k < std::min(kfull, K + 1); ++k) {
      const int n = clip_annulus(a, b, xi, deltas[k], eps, parts);
      for (int j = 0; j < n; ++j)
        partial[k].add(std::abs(angle_increment(lerp(a, b, parts[j].lo), lerp(a, b, parts[j].hi), xi)));
    }
  }
  VariationResult res;
  std::vector<double> values(K + 1);
  CompensatedSum<double> running;
  for (int k = 0; k <= K; ++k) {
    running.add(full[k].value());
    values[k] = running.value() + partial[k].value();
    res.trace.emplace_back(deltas[k], values[k]);
  }
  res.value = values.back();
  res.status = classify_trace(deltas, values, curve.resolved_scale(), policy);
  return res;
}

double stieltjes_arg_integral(const Curve& curve, const Density& g, cplx xi, double delta, double eps) {
  const CurveLocation loc = curve.nearest(xi);
  return stieltjes_arg_integral_at(curve, g, xi, g(xi, loc.s), delta, eps);
}

double stieltjes_arg_integral_at(const Curve& curve, const Density& g, cplx xi, double gxi, double delta, double eps,
                                 const std::vector<std::size_t>* segments) {
  if (!(delta > 0.0)) throw DomainError("inner radius must be positive");
  if (!(delta < eps)) throw DomainError("inner radius must be below the outer radius");
  CompensatedSum<double> acc;
  MidpointStieltjes rule{g, xi, gxi, delta, eps, acc};
  if (segments) {
    for (std::size_t i : *segments) rule.run(curve, i, 0.0, 1.0, 0);
  } else {
    for (std::size_t i = 0; i < curve.segment_count(); ++i) rule.run(curve, i, 0.0, 1.0, 0);
  }
  return acc.value();
}

double stieltjes_arg_integral_exact(const Curve& curve, const std::vector<double>& gv, cplx xi, double gxi,
                                    double delta, double eps) {
  if (delta < 0.0 || !(delta < eps)) throw DomainError("need 0 <= delta < eps");
  CompensatedSum<double> acc;
  const auto& v = curve.vertices();
  Interval parts[2];
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const int n = clip_annulus(v[i], v[i + 1], xi, delta, eps, parts);
    for (int k = 0; k < n; ++k) {
      const cplx p = lerp(v[i], v[i + 1], parts[k].lo), q = lerp(v[i], v[i + 1], parts[k].hi);
      if (on_segment(xi, p, q, on_segment_tol(v[i], v[i + 1], xi))) continue;
      const double gp = gv[i] + parts[k].lo * (gv[i + 1] - gv[i]);
      const double gq = gv[i] + parts[k].hi * (gv[i + 1] - gv[i]);
      acc.add(segment_cauchy(p, q, gp - gxi, gq - gxi, xi).imag());
    }
  }
  return acc.value();
}

double interpolate_at(const Curve& curve, const std::vector<double>& gv, cplx xi) {
  const CurveLocation loc = curve.nearest(xi);
  return gv[loc.segment] + loc.u * (gv[loc.segment + 1] - gv[loc.segment]);
}

void write_trace_csv(const std::string& path, const std::string& value_column, const Trace& trace) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << std::setprecision(17) << "delta," << value_column << '\n';
  for (const auto& [d, val] : trace) f << d << ',' << val << '\n';
}

}  // namespace layerpot
