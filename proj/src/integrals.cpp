#include "layerpot/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "layerpot/kernels.hpp"

namespace layerpot {

namespace {

constexpr double kOnCurve = 1e-12;
const cplx kI(0.0, 1.0);

cplx lerp(cplx a, cplx b, double u) { return a + u * (b - a); }

double min_distance(const Curve& curve, cplx z) {
  const auto& v = curve.vertices();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) d = std::min(d, point_segment_distance(z, v[i], v[i + 1]));
  return d;
}

struct AdaptiveCauchy {
  const Density& g;
  cplx z;
  double angle_max;
  double chord_ratio;
  CompensatedSum<cplx>& acc;

  void run(cplx a, cplx b, double ga, double gb, double sa, double sb, int depth) {
    const cplx m = 0.5 * (a + b);
    const double dm = std::abs(m - z);
    if (depth < 50 && (std::abs(angle_increment(a, b, z)) > angle_max || std::abs(b - a) > chord_ratio * dm)) {
      const double sm = 0.5 * (sa + sb);
      const double gm = g(m, sm);
      run(a, m, ga, gm, sa, sm, depth + 1);
      run(m, b, gm, gb, sm, sb, depth + 1);
      return;
    }
    acc.add(segment_cauchy(a, b, ga, gb, z));
  }
};

cplx adaptive_sum(const Curve& curve, const Density& g, const std::vector<double>& gv, cplx z, int level) {
  CompensatedSum<cplx> acc;
  AdaptiveCauchy rule{g, z, std::ldexp(kPi / 64.0, -level), std::ldexp(1.0 / 8.0, -level), acc};
  const auto& v = curve.vertices();
  const auto& s = curve.arc_coords();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) rule.run(v[i], v[i + 1], gv[i], gv[i + 1], s[i], s[i + 1], 0);
  return acc.value();
}

cplx cauchy_with_values(const Curve& curve, const Density& g, const std::vector<double>& gv, cplx z,
                        const QuadratureOptions& options) {
  const double dist = min_distance(curve, z);
  if (dist <= kOnCurve) throw SingularityError("evaluation point lies on the curve");
  cplx prev = adaptive_sum(curve, g, gv, z, 0);
  const double tol = options.tol * std::max(1.0, 1.0 / dist);
  for (int level = 1; level <= options.max_refine; ++level) {
    const cplx next = adaptive_sum(curve, g, gv, z, level);
    const bool agree = std::abs(next - prev) <= tol;
    prev = next;
    if (agree) break;
  }
  return prev / (kTwoPi * kI);
}

// Index of the vertex at the located point, or npos when it is interior to a segment.
std::size_t vertex_at(const Curve& curve, const CurveLocation& loc) {
  const double ell = curve.segment_length(loc.segment);
  const double tol = 1e-12 * std::max(ell, 1e-300);
  if (loc.u * ell <= tol) return loc.segment;
  if ((1.0 - loc.u) * ell <= tol) return loc.segment + 1 == curve.segment_count() ? 0 : loc.segment + 1;
  return std::string::npos;
}

bool approach_ok(const Curve& curve, cplx xi, cplx dir, const std::vector<double>& h, Side side) {
  const int want = side == Side::Plus ? 1 : 0;
  for (double hk : h) {
    const cplx z = xi + hk * dir;
    if (min_distance(curve, z) <= kOnCurve) return false;
    if (winding_number(curve, z) != want) return false;
  }
  return true;
}

// Fallback aim: middle of the longest run of directions whose largest and
// smallest approach points both land on the requested side.
bool reaim(const Curve& curve, cplx xi, const std::vector<double>& h, Side side, cplx& dir) {
  constexpr int kDirs = 720;
  const int want = side == Side::Plus ? 1 : 0;
  std::vector<char> good(kDirs);
  for (int j = 0; j < kDirs; ++j) {
    const cplx d = std::polar(1.0, kTwoPi * j / kDirs);
    bool ok = true;
    for (double hk : {h.front(), h.back()}) {
      const cplx z = xi + hk * d;
      if (min_distance(curve, z) <= kOnCurve || winding_number(curve, z) != want) ok = false;
    }
    good[j] = ok;
  }
  int best_len = 0, best_start = 0;
  for (int start = 0; start < kDirs; ++start) {
    if (!good[start] || good[(start + kDirs - 1) % kDirs]) continue;
    int len = 0;
    while (len < kDirs && good[(start + len) % kDirs]) ++len;
    if (len > best_len) best_len = len, best_start = start;
  }
  if (best_len == 0 && std::all_of(good.begin(), good.end(), [](char c) { return c != 0; })) best_len = kDirs;
  if (best_len == 0) return false;
  const double mid = kTwoPi * (best_start + 0.5 * (best_len - 1)) / kDirs;
  dir = std::polar(1.0, mid);
  return approach_ok(curve, xi, dir, h, side);
}

// max |g(t) - g(xi)| over curve points |t - xi| <= r, from the vertices and
// the disk crossings.
double local_oscillation(const Curve& curve, const Density& g, cplx xi, double gxi, double r) {
  const auto& v = curve.vertices();
  const auto& arc = curve.arc_coords();
  double w = 0.0;
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const Interval in = disk_interval(v[i], v[i + 1], xi, r);
    if (!(in.width() >= 0.0)) continue;
    for (double u : {in.lo, in.hi})
      w = std::max(w, std::abs(g(lerp(v[i], v[i + 1], u), arc[i] + u * curve.segment_length(i)) - gxi));
  }
  return w;
}

void require_writable(std::ofstream& f, const std::string& path) {
  if (!f) throw ConfigError("cannot write " + path);
}

}  // namespace

cplx cauchy_integral(const Curve& curve, const Density& g, cplx z, const QuadratureOptions& options) {
  return cauchy_with_values(curve, g, g.at_vertices(curve), z, options);
}

cplx cauchy_integral(const Curve& curve, const std::vector<double>& gv, cplx z) {
  const auto& v = curve.vertices();
  if (min_distance(curve, z) <= kOnCurve) throw SingularityError("evaluation point lies on the curve");
  CompensatedSum<cplx> acc;
  for (std::size_t i = 0; i < curve.segment_count(); ++i) acc.add(segment_cauchy(v[i], v[i + 1], gv[i], gv[i + 1], z));
  return acc.value() / (kTwoPi * kI);
}

double double_layer_potential(const Curve& curve, const Density& g, cplx z, const QuadratureOptions& options) {
  return cauchy_integral(curve, g, z, options).real();
}

double double_layer_potential(const Curve& curve, const std::vector<double>& gv, cplx z) {
  return cauchy_integral(curve, gv, z).real();
}

PVResult pv_reduced_singular(const Curve& curve, const std::vector<double>& gv, cplx xi, const Schedule& schedule,
                             const ConvergencePolicy& policy) {
  const CurveLocation loc = curve.nearest(xi);
  xi = loc.point;
  PVResult res;
  res.tolerance = policy.tol;
  res.g_xi = gv[loc.segment] + loc.u * (gv[loc.segment + 1] - gv[loc.segment]);
  std::vector<double> deltas = schedule_deltas(curve, xi, schedule);
  if (schedule.count <= 0)
    for (int k = 0; k < 20; ++k) deltas.push_back(0.5 * deltas.back());

  const auto& v = curve.vertices();
  CompensatedSum<cplx> far;
  std::vector<std::size_t> near;
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    if (point_segment_distance(xi, v[i], v[i + 1]) > deltas.front())
      far.add(segment_cauchy(v[i], v[i + 1], gv[i] - res.g_xi, gv[i + 1] - res.g_xi, xi));
    else
      near.push_back(i);
  }
  Interval parts[2];
  for (double d : deltas) {
    CompensatedSum<cplx> acc = far;
    for (std::size_t i : near) {
      const int n = clip_annulus(v[i], v[i + 1], xi, d, std::numeric_limits<double>::infinity(), parts);
      for (int k = 0; k < n; ++k) {
        const cplx p = lerp(v[i], v[i + 1], parts[k].lo), q = lerp(v[i], v[i + 1], parts[k].hi);
        const double gp = gv[i] + parts[k].lo * (gv[i + 1] - gv[i]);
        const double gq = gv[i] + parts[k].hi * (gv[i + 1] - gv[i]);
        acc.add(segment_cauchy(p, q, gp - res.g_xi, gq - res.g_xi, xi));
      }
    }
    res.trace.emplace_back(d, acc.value());
  }

  std::vector<double> re(deltas.size()), im(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) re[k] = res.trace[k].second.real(), im[k] = res.trace[k].second.imag();
  res.re_status = classify_trace(deltas, re, curve.resolved_scale(), policy);
  res.im_status = classify_trace(deltas, im, curve.resolved_scale(), policy);
  const std::size_t K = deltas.size() - 1;
  const cplx last = res.trace[K].second, before = res.trace[K - 1].second;
  res.value = 2.0 * last - before;
  res.re_converged = std::abs(last.real() - before.real()) < policy.tol && res.re_status != TraceStatus::Divergent;
  res.im_converged = std::abs(last.imag() - before.imag()) < policy.tol && res.im_status != TraceStatus::Divergent;
  res.converged = res.re_converged && res.im_converged;
  return res;
}

PVResult pv_reduced_singular(const Curve& curve, const Density& g, cplx xi, const Schedule& schedule,
                             const ConvergencePolicy& policy) {
  return pv_reduced_singular(curve, g.at_vertices(curve), xi, schedule, policy);
}

SokhotskiResult sokhotski_values(const Curve& curve, const Density& g, cplx xi, const Schedule& schedule,
                                 const ConvergencePolicy& policy) {
  SokhotskiResult r;
  r.pv = pv_reduced_singular(curve, g, xi, schedule, policy);
  r.g_xi = r.pv.g_xi;
  if (r.pv.converged) {
    r.full = true;
    r.minus = r.pv.value / (kTwoPi * kI);
    r.plus = r.g_xi + r.minus;
    r.re_plus = r.plus.real();
    r.re_minus = r.minus.real();
  } else if (r.pv.im_converged) {
    r.re_minus = r.pv.value.imag() / kTwoPi;
    r.re_plus = r.g_xi + r.re_minus;
  } else {
    throw NonConvergenceError("principal value did not converge at the requested point");
  }
  return r;
}

BoundaryValueResult boundary_limit(const Curve& curve, const Density& g, cplx xi, Side side,
                                   const ApproachOptions& options) {
  const CurveLocation loc = curve.nearest(xi);
  const auto& v = curve.vertices();
  const std::size_t n = curve.segment_count();
  BoundaryValueResult res;
  res.xi = loc.point;
  res.side = side;
  const std::vector<double> gv = g.at_vertices(curve);
  res.g_xi = gv[loc.segment] + loc.u * (gv[loc.segment + 1] - gv[loc.segment]);

  cplx tangent;
  double ell;
  const std::size_t vert = vertex_at(curve, loc);
  if (vert == std::string::npos) {
    tangent = v[loc.segment + 1] - v[loc.segment];
    ell = curve.segment_length(loc.segment);
  } else {
    const std::size_t in = (vert + n - 1) % n, out = vert;
    const cplx din = v[in + 1] - v[in], dout = v[out + 1] - v[out];
    tangent = din / std::abs(din) + dout / std::abs(dout);
    if (std::abs(tangent) < 1e-12) tangent = dout;
    ell = std::min(std::abs(din), std::abs(dout));
  }
  cplx dir = kI * tangent / std::abs(tangent);
  if (side == Side::Minus) dir = -dir;

  const double h0 = options.h0 > 0.0 ? options.h0 : std::min(curve.diameter() / 8.0, 8.0 * ell);
  std::vector<double> h(static_cast<std::size_t>(options.levels) + 1);
  for (int k = 0; k <= options.levels; ++k) h[k] = std::ldexp(h0, -k);
  if (!approach_ok(curve, res.xi, dir, h, side)) {
    if (!reaim(curve, res.xi, h, side, dir)) throw DomainError("no straight approach stays on the requested side");
    res.reaimed = true;
  }
  res.direction = dir;

  const double tol_abs = 1e-6;
  for (std::size_t k = 0; k < h.size(); ++k) {
    res.approach.emplace_back(h[k], double_layer_potential(curve, gv, res.xi + h[k] * dir));
    if (k == 0) continue;
    const double L = 2.0 * res.approach[k].second - res.approach[k - 1].second;
    res.extrapolants.push_back(L);
    res.limit = L;
    if (res.extrapolants.size() >= 2) {
      const double omega = local_oscillation(curve, g, res.xi, res.g_xi, h[k]);
      const std::size_t m = res.extrapolants.size();
      if (std::abs(res.extrapolants[m - 1] - res.extrapolants[m - 2]) < tol_abs + 1e-3 * omega) {
        res.converged = true;
        break;
      }
    }
  }
  if (res.extrapolants.empty()) res.limit = res.approach.back().second;
  const std::size_t m = res.extrapolants.size();
  if (m >= 4) {
    const double d1 = std::abs(res.extrapolants[m - 1] - res.extrapolants[m - 2]);
    const double d2 = std::abs(res.extrapolants[m - 2] - res.extrapolants[m - 3]);
    const double d3 = std::abs(res.extrapolants[m - 3] - res.extrapolants[m - 4]);
    res.stabilized = res.converged || (d1 <= d2 && d2 <= d3);
    res.last_change = d1;
  } else {
    res.stabilized = res.converged;
  }

  const double S = stieltjes_arg_integral_exact(curve, gv, res.xi, res.g_xi, 0.0);
  res.formula = (side == Side::Plus ? res.g_xi : 0.0) + S / kTwoPi;
  res.discrepancy = std::abs(res.limit - res.formula);
  return res;
}

std::vector<CriterionRow> criterion_sweep(const Curve& curve, const Density& g, const std::vector<double>& eps,
                                          const std::vector<cplx>& xi_grid, const CriterionOptions& options) {
  const std::size_t nx = xi_grid.size(), ne = eps.size();
  std::vector<double> best(nx * ne, 0.0);
  const auto& v = curve.vertices();
  parallel_for(nx, options.threads, [&](std::size_t ix) {
    const CurveLocation loc = curve.nearest(xi_grid[ix]);
    const cplx xi = loc.point;
    const double gxi = g(xi, loc.s);
    std::vector<std::size_t> cand;
    const double emax = *std::max_element(eps.begin(), eps.end());
    std::vector<double> dmin;
    for (std::size_t i = 0; i < curve.segment_count(); ++i) {
      const double d = point_segment_distance(xi, v[i], v[i + 1]);
      if (d <= emax) cand.push_back(i), dmin.push_back(d);
    }
    for (std::size_t ie = 0; ie < ne; ++ie) {
      double outer = eps[ie], acc = 0.0, sup = 0.0;
      for (int j = 1; j <= options.delta_levels; ++j) {
        const double inner = std::ldexp(eps[ie], -j);
        std::vector<std::size_t> shell;
        for (std::size_t c = 0; c < cand.size(); ++c)
          if (dmin[c] <= outer) shell.push_back(cand[c]);
        acc += stieltjes_arg_integral_at(curve, g, xi, gxi, inner, outer, &shell);
        sup = std::max(sup, std::abs(acc));
        outer = inner;
      }
      best[ix * ne + ie] = sup;
    }
  });
  std::vector<CriterionRow> rows(ne);
  for (std::size_t ie = 0; ie < ne; ++ie) {
    rows[ie].eps = eps[ie];
    for (std::size_t ix = 0; ix < nx; ++ix)
      if (ix == 0 || best[ix * ne + ie] > rows[ie].value) {
        rows[ie].value = best[ix * ne + ie];
        rows[ie].argmax = xi_grid[ix];
      }
  }
  return rows;
}

double criterion_functional(const Curve& curve, const Density& g, double eps, const std::vector<cplx>& xi_grid,
                            const std::vector<double>& delta_grid, unsigned threads) {
  std::vector<double> deltas;
  for (double d : delta_grid)
    if (d > 0.0 && d < eps) deltas.push_back(d);
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  std::vector<double> sup(xi_grid.size(), 0.0);
  parallel_for(xi_grid.size(), threads, [&](std::size_t ix) {
    const CurveLocation loc = curve.nearest(xi_grid[ix]);
    const double gxi = g(loc.point, loc.s);
    double outer = eps, acc = 0.0;
    for (double d : deltas) {
      acc += stieltjes_arg_integral_at(curve, g, loc.point, gxi, d, outer);
      sup[ix] = std::max(sup[ix], std::abs(acc));
      outer = d;
    }
  });
  return sup.empty() ? 0.0 : *std::max_element(sup.begin(), sup.end());
}

std::vector<FieldPoint> potential_field(const Curve& curve, const Density& g, const FieldGrid& grid, unsigned threads,
                                        const QuadratureOptions& options) {
  if (grid.nx < 1 || grid.ny < 1) throw ConfigError("field grid must have at least one point per axis");
  const std::vector<double> gv = g.at_vertices(curve);
  std::vector<FieldPoint> out(static_cast<std::size_t>(grid.nx) * grid.ny);
  parallel_for(out.size(), threads, [&](std::size_t idx) {
    const int ix = static_cast<int>(idx % grid.nx), iy = static_cast<int>(idx / grid.nx);
    FieldPoint& p = out[idx];
    p.x = grid.nx == 1 ? grid.xmin : grid.xmin + (grid.xmax - grid.xmin) * ix / (grid.nx - 1);
    p.y = grid.ny == 1 ? grid.ymin : grid.ymin + (grid.ymax - grid.ymin) * iy / (grid.ny - 1);
    const cplx z(p.x, p.y);
    if (min_distance(curve, z) <= kOnCurve) {
      p.on_curve = true;
      p.value = cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
      return;
    }
    p.winding = winding_number(curve, z);
    p.value = cauchy_with_values(curve, g, gv, z, options);
  });
  return out;
}

void write_field_csv(const std::string& path, const std::vector<FieldPoint>& field) {
  std::ofstream f(path);
  require_writable(f, path);
  f << std::setprecision(17) << "x,y,re,im,inside\n";
  for (const auto& p : field)
    f << p.x << ',' << p.y << ',' << p.value.real() << ',' << p.value.imag() << ',' << (p.on_curve ? -1 : p.winding)
      << '\n';
}

std::vector<BoundarySweepRow> boundary_sweep(const Curve& curve, const Density& g, const std::vector<cplx>& xi,
                                             const ApproachOptions& options, unsigned threads) {
  std::vector<BoundarySweepRow> rows(xi.size());
  parallel_for(xi.size(), threads, [&](std::size_t i) {
    BoundarySweepRow& r = rows[i];
    r.s = curve.nearest(xi[i]).s;
    const BoundaryValueResult plus = boundary_limit(curve, g, xi[i], Side::Plus, options);
    const BoundaryValueResult minus = boundary_limit(curve, g, xi[i], Side::Minus, options);
    r.g_xi = plus.g_xi;
    r.plus_formula = plus.formula;
    r.plus_limit = plus.limit;
    r.minus_formula = minus.formula;
    r.minus_limit = minus.limit;
    r.jump = plus.limit - minus.limit;
    r.converged = plus.converged && minus.converged;
    r.stabilized = plus.stabilized && minus.stabilized;
    r.pv_full = pv_reduced_singular(curve, g, xi[i]).converged;
  });
  return rows;
}

void write_boundary_csv(const std::string& path, const std::vector<BoundarySweepRow>& rows) {
  std::ofstream f(path);
  require_writable(f, path);
  f << std::setprecision(17)
    << "s,re_plus_formula,re_plus_extrapolated,re_minus_formula,re_minus_extrapolated,jump,g,pv_full\n";
  for (const auto& r : rows)
    f << r.s << ',' << r.plus_formula << ',' << r.plus_limit << ',' << r.minus_formula << ',' << r.minus_limit << ','
      << r.jump << ',' << r.g_xi << ',' << (r.pv_full ? 1 : 0) << '\n';
}

void write_criterion_csv(const std::string& path, const std::vector<CriterionRow>& rows) {
  std::ofstream f(path);
  require_writable(f, path);
  f << std::setprecision(17) << "eps,criterion,argmax_x,argmax_y\n";
  for (const auto& r : rows) f << r.eps << ',' << r.value << ',' << r.argmax.real() << ',' << r.argmax.imag() << '\n';
}

}  // namespace layerpot
