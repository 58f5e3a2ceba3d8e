#include "layerpot/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace layerpot {

namespace {

using GenPtr = std::shared_ptr<Generator>;

Piece segment_piece(cplx a, cplx b, std::string label) {
  return Piece{[a, b](double u) { return u == 1.0 ? b : a + u * (b - a); }, 0.0, 1.0,
               std::numeric_limits<double>::infinity(), std::move(label)};
}

// Segment on the real axis parameterized by x itself, so endpoints are exact.
Piece axis_piece(double x0, double x1, std::string label) {
  return Piece{[](double x) { return cplx(x, 0.0); }, x0, x1, std::numeric_limits<double>::infinity(),
               std::move(label)};
}

Piece arc_piece(double radius, double phi0, double phi1, std::string label) {
  return Piece{[radius](double phi) { return phi == 0.0 ? cplx(radius, 0.0) : std::polar(radius, phi); }, phi0, phi1,
               std::numeric_limits<double>::infinity(), std::move(label)};
}

// Ellipse through the origin, parameterized by the angle sigma from the bottom vertex.
cplx ellipse_from_bottom(double a, double b, double sigma) {
  const double h = std::sin(0.5 * sigma);
  return {a * std::sin(sigma), 2.0 * b * h * h};
}

Curve finish(GenPtr gen, const ResolutionPolicy& policy, double resolved) {
  ResolutionPolicy p = policy;
  if (p.floor <= 0.0 && resolved > 0.0) p.floor = resolved / 64.0;
  Curve c = build_polyline(gen, p);
  c.set_resolved_scale(resolved);
  return c;
}

double dyadic(int k) { return std::ldexp(1.0, -k); }

// Shared chain for the first and fourth examples. arc_angle(m) is the angular
// width of the arc of radius 2^-m; spiral(r) traces the spiral pieces.
Curve dyadic_comb(const std::string& id, int depth, const ResolutionPolicy& policy,
                  const std::function<double(int)>& arc_angle, const std::function<cplx(double)>& spiral) {
  if (depth < 2) throw ConfigError(id + " needs depth N >= 2");
  if (depth > 500) throw ConfigError(id + " depth is limited to 500");
  auto gen = std::make_shared<Generator>();
  gen->id = id;
  gen->params = {{"depth", depth}, {"stitch_length", dyadic(2 * depth)}, {"arcs", 2 * depth}};
  gen->anchors = {cplx(0.0, 0.0)};
  gen->pieces.push_back(arc_piece(1.0, 0.0, kPi, "semicircle"));
  gen->pieces.back().eval = [](double phi) { return phi == kPi ? cplx(-1.0, 0.0) : std::polar(1.0, phi); };
  gen->pieces.push_back(axis_piece(-1.0, 0.0, "segment[-1,0]"));
  gen->pieces.push_back(axis_piece(0.0, dyadic(2 * depth), "stitch"));
  auto spiral_piece = [&](int n) {
    const double lo = std::log(dyadic(2 * n)), hi = std::log(dyadic(2 * n - 1));
    return Piece{[spiral, n](double p) {
                   // Exact dyadic radii at the piece ends keep the chain closed.
                   const double r = std::exp(p);
                   return spiral(r);
                 },
                 lo, hi, std::numeric_limits<double>::infinity(), "spiral" + std::to_string(n)};
  };
  for (int n = depth; n >= 1; --n) {
    const int m_in = 2 * n, m_out = 2 * n - 1;
    gen->pieces.push_back(arc_piece(dyadic(m_in), 0.0, arc_angle(m_in), "arc" + std::to_string(m_in)));
    gen->pieces.push_back(spiral_piece(n));
    gen->pieces.push_back(arc_piece(dyadic(m_out), arc_angle(m_out), 0.0, "arc" + std::to_string(m_out)));
    gen->pieces.push_back(axis_piece(dyadic(m_out), dyadic(m_out - 1), "segment" + std::to_string(n)));
  }
  // Junction points of spirals are evaluated from exp(log r); snap them to the arcs.
  for (std::size_t k = 0; k < gen->pieces.size(); ++k) {
    Piece& p = gen->pieces[k];
    if (p.label.rfind("spiral", 0) != 0) continue;
    const cplx start = gen->pieces[k - 1].eval(gen->pieces[k - 1].p1);
    const cplx end = gen->pieces[k + 1].eval(gen->pieces[k + 1].p0);
    auto inner = p.eval;
    const double lo = p.p0, hi = p.p1;
    p.eval = [inner, lo, hi, start, end](double q) { return q == lo ? start : (q == hi ? end : inner(q)); };
  }
  return finish(gen, policy, dyadic(2 * depth));
}

double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-17 * std::abs(lo)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Curve make_circle(double radius, const ResolutionPolicy& policy) {
  if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
  auto gen = std::make_shared<Generator>();
  gen->id = "circle";
  gen->params = {{"radius", radius}};
  gen->pieces.push_back(Piece{[radius](double t) { return (t == 0.0 || t == kTwoPi) ? cplx(radius, 0.0) : std::polar(radius, t); },
                              0.0, kTwoPi, std::numeric_limits<double>::infinity(), "circle"});
  return build_polyline(gen, policy);
}

Curve make_ellipse(double a, double b, const ResolutionPolicy& policy) {
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("ellipse semi-axes must be positive");
  auto gen = std::make_shared<Generator>();
  gen->id = "ellipse";
  gen->params = {{"a", a}, {"b", b}};
  gen->pieces.push_back(Piece{[a, b](double t) {
                                if (t == 0.0 || t == kTwoPi) return cplx(a, 0.0);
                                return cplx(a * std::cos(t), b * std::sin(t));
                              },
                              0.0, kTwoPi, std::numeric_limits<double>::infinity(), "ellipse"});
  return build_polyline(gen, policy);
}

Curve make_lyapunov_blob(double amplitude, double alpha, int harmonics, const ResolutionPolicy& policy) {
  if (!(amplitude >= 0.0 && amplitude < 0.5)) throw ConfigError("lyapunov amplitude must lie in [0, 0.5)");
  if (harmonics < 1) throw ConfigError("lyapunov blob needs at least one harmonic");
  auto gen = std::make_shared<Generator>();
  gen->id = "lyapunov_blob";
  // The perturbation is a trigonometric polynomial, hence smooth; alpha only
  // records the Hoelder exponent the caller intends to test against.
  gen->params = {{"amplitude", amplitude}, {"alpha", alpha}, {"harmonics", harmonics}, {"smooth", true}};
  const double A = amplitude;
  const int H = harmonics;
  auto radius = [A, H](double t) {
    double r = 1.0;
    for (int k = 1; k <= H; ++k) r += (A / H) * std::cos((k + 1) * t + k);
    return r;
  };
  gen->pieces.push_back(Piece{[radius](double t) {
                                const double tt = (t == kTwoPi) ? 0.0 : t;
                                return radius(tt) * cplx(std::cos(tt), std::sin(tt));
                              },
                              0.0, kTwoPi, std::numeric_limits<double>::infinity(), "blob"});
  return build_polyline(gen, policy);
}

Curve make_example1(int depth, const ResolutionPolicy& policy) {
  return dyadic_comb(
      "example1", depth, policy, [](int m) { return dyadic(m); }, [](double r) { return std::polar(r, r); });
}

Curve make_example4(int depth, const ResolutionPolicy& policy) {
  return dyadic_comb(
      "example4", depth, policy, [](int m) { return 1.0 / m; },
      [](double r) { return std::polar(r, -std::log(2.0) / std::log(r)); });
}

Density make_density_example4() { return Density::log_example(); }

cplx example2_spiral(double r) { return std::polar(r, -1.0 / std::log(r)); }

cplx example2_spiral_derivative(double r) {
  const double L = std::log(r);
  return std::polar(1.0, -1.0 / L) * cplx(1.0, 1.0 / (L * L));
}

EllipseGlue glue_ellipse(cplx point, cplx direction) {
  const double x0 = point.real(), y0 = point.imag();
  if (!(x0 > 0.0 && y0 > 0.0)) throw ConstructionError("ellipse glue point must lie in the open first quadrant");
  // s is the standard ellipse angle: (a cos s, b + b sin s).
  auto residual = [&](double s) {
    const double a = x0 / std::cos(s), b = y0 / (1.0 + std::sin(s));
    const cplx tangent(-a * std::sin(s), b * std::cos(s));
    return tangent.real() * direction.imag() - tangent.imag() * direction.real();
  };
  const double lim = 0.5 * kPi - 1e-6;
  const int scan = 400;
  double prev_s = -lim, prev_r = residual(prev_s);
  for (int k = 1; k <= scan; ++k) {
    const double s = -lim + 2.0 * lim * k / scan;
    const double r = residual(s);
    if ((r < 0) != (prev_r < 0)) {
      const double root = bisect(residual, prev_s, s);
      EllipseGlue g;
      g.a = x0 / std::cos(root);
      g.b = y0 / (1.0 + std::sin(root));
      g.sigma = root + 0.5 * kPi;
      const cplx tangent(-g.a * std::sin(root), g.b * std::cos(root));
      if ((tangent * std::conj(direction)).real() <= 0.0) continue;  // opposite orientation
      return g;
    }
    prev_s = s;
    prev_r = r;
  }
  throw ConstructionError("no axis-aligned ellipse through 0 matches the glue tangent");
}

Example2Geometry example2_geometry() {
  Example2Geometry g;
  auto re_deriv = [](double r) { return example2_spiral_derivative(r).real(); };
  const double lo = std::exp(-1.0 / 0.1), hi = std::exp(-1.0 / 1.5);
  if (!(re_deriv(lo) > 0.0 && re_deriv(hi) < 0.0)) throw ConstructionError("cannot bracket the root of Re t'(r)");
  g.r0 = bisect(re_deriv, lo, hi);
  g.r_min = 1e-100;
  g.ellipse.a = example2_spiral(g.r0).real();
  g.ellipse.b = example2_spiral(g.r0).imag();
  g.ellipse.sigma = 0.5 * kPi;
  return g;
}

Curve make_example2(const ResolutionPolicy& policy) {
  const Example2Geometry geo = example2_geometry();
  auto gen = std::make_shared<Generator>();
  gen->id = "example2";
  gen->params = {{"r0", geo.r0},
                 {"r_min", geo.r_min},
                 {"ellipse_a", geo.ellipse.a},
                 {"ellipse_b", geo.ellipse.b},
                 {"re_derivative_at_r0", example2_spiral_derivative(geo.r0).real()}};
  gen->anchors = {cplx(0.0, 0.0)};
  const cplx t_min = example2_spiral(geo.r_min);
  const cplx t0 = example2_spiral(geo.r0);
  gen->pieces.push_back(segment_piece(0.0, t_min, "stitch"));
  const double lo = std::log(geo.r_min), hi = std::log(geo.r0);
  gen->pieces.push_back(Piece{[lo, hi, t_min, t0](double p) {
                                if (p == lo) return t_min;
                                if (p == hi) return t0;
                                return example2_spiral(std::exp(p));
                              },
                              lo, hi, 1.0 / 16.0, "spiral"});
  const double a = geo.ellipse.a, b = geo.ellipse.b;
  const double s0 = geo.ellipse.sigma - kTwoPi;
  gen->pieces.push_back(Piece{[a, b, s0, t0](double s) { return s == s0 ? t0 : ellipse_from_bottom(a, b, s); }, s0,
                              0.0, std::numeric_limits<double>::infinity(), "ellipse"});
  // The ellipse is smooth at 0; grading it all the way to r_min would produce
  // segments below the resolution of the arc coordinate.
  gen->pieces.back().grading_floor = 1e-12;
  return finish(gen, policy, geo.r_min);
}

cplx example3_arc(double r) {
  const double phase = (r / std::log(r)) * std::cos(kPi / r);
  return std::polar(r, -phase);
}

cplx example3_arc_derivative(double r) {
  const double L = std::log(r);
  const double c = std::cos(kPi / r), s = std::sin(kPi / r);
  const double phase = (r / L) * c;
  // d/dr of (r/L) cos(pi/r)
  const double dphase = c * (L - 1.0) / (L * L) + (r / L) * s * kPi / (r * r);
  return std::polar(1.0, -phase) * cplx(1.0, -r * dphase);
}

EllipseGlue example3_ellipse() { return glue_ellipse(example3_arc(0.5), example3_arc_derivative(0.5)); }

Curve make_example3(int depth, const ResolutionPolicy& policy) {
  if (depth < 2) throw ConfigError("example3 needs depth N >= 2");
  if (depth > 12) throw ConfigError("example3 depth is limited to 12 (memory)");
  const double r_min = dyadic(2 * depth);
  const EllipseGlue el = example3_ellipse();
  auto gen = std::make_shared<Generator>();
  gen->id = "example3";
  gen->params = {{"depth", depth},
                 {"r_min", r_min},
                 {"ellipse_a", el.a},
                 {"ellipse_b", el.b},
                 {"segments_per_period", 32}};
  gen->anchors = {cplx(0.0, 0.0)};
  const cplx t_min = example3_arc(r_min);
  const cplx t_half = example3_arc(0.5);
  gen->pieces.push_back(segment_piece(0.0, t_min, "stitch"));
  // Parameter u = pi / r, so one period of cos(pi / r) is 2 pi in u.
  const double u0 = kPi / r_min, u1 = 2.0 * kPi;
  gen->pieces.push_back(Piece{[u0, u1, t_min, t_half](double u) {
                                if (u == u0) return t_min;
                                if (u == u1) return t_half;
                                return example3_arc(kPi / u);
                              },
                              u0, u1, kTwoPi / 32.0, "oscillating arc"});
  const double s0 = el.sigma - kTwoPi;
  const double a = el.a, b = el.b;
  gen->pieces.push_back(Piece{[a, b, s0, t_half](double s) { return s == s0 ? t_half : ellipse_from_bottom(a, b, s); },
                              s0, 0.0, std::numeric_limits<double>::infinity(), "ellipse"});
  ResolutionPolicy p = policy;
  if (p.floor <= 0.0) p.floor = r_min / 64.0;
  // Turning is controlled by the fixed samples per period.
  p.max_turn = std::max(p.max_turn, 0.5);
  Curve c = build_polyline(gen, p);
  c.set_resolved_scale(r_min);
  return c;
}

std::string canonical_zoo_name(const std::string& name) {
  if (name == "ex1") return "example1";
  if (name == "ex2") return "example2";
  if (name == "ex3") return "example3";
  if (name == "ex4") return "example4";
  if (name == "lyapunov") return "lyapunov_blob";
  return name;
}

std::vector<std::string> zoo_names() {
  return {"circle", "ellipse", "lyapunov", "ex1", "ex2", "ex3", "ex4"};
}

Curve make_zoo(const ZooSpec& spec) {
  const std::string name = canonical_zoo_name(spec.name);
  if (name == "circle") return make_circle(spec.radius, spec.policy);
  if (name == "ellipse") return make_ellipse(spec.a, spec.b, spec.policy);
  if (name == "lyapunov_blob") return make_lyapunov_blob(spec.amplitude, spec.alpha, spec.harmonics, spec.policy);
  if (name == "example1") return make_example1(spec.depth, spec.policy);
  if (name == "example2") return make_example2(spec.policy);
  if (name == "example3") return make_example3(spec.depth, spec.policy);
  if (name == "example4") return make_example4(spec.depth, spec.policy);
  throw ConfigError("unknown zoo curve '" + spec.name + "'");
}

}  // namespace layerpot
