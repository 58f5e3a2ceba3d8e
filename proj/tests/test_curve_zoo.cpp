#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "layerpot/arg_tracker.hpp"
#include "layerpot/diagnostics.hpp"
#include "layerpot/zoo.hpp"

using namespace layerpot;

namespace {

double angle_between(cplx a, cplx b) { return std::abs(std::arg(a / b)); }

// Forward difference of a generator piece at its start, in the direction of travel.
cplx start_direction(const Piece& p) {
  const double dp = std::copysign(1e-9 * std::max(1.0, std::abs(p.p0)), p.p1 - p.p0);
  return p.eval(p.p0 + dp) - p.eval(p.p0);
}

cplx end_direction(const Piece& p) {
  const double dp = std::copysign(1e-9 * std::max(1.0, std::abs(p.p1)), p.p1 - p.p0);
  return p.eval(p.p1) - p.eval(p.p1 - dp);
}

double sum_inverse_nlogn(int N) {
  double s = 0.0;
  for (int n = 2; n <= N; ++n) s += 1.0 / (n * std::log(static_cast<double>(n)));
  return s;
}

// Variation of arg t along consecutive vertices of the pieces labelled `prefix`.
double piece_arg_variation(const Curve& c, const std::string& prefix) {
  const auto idx = vertices_on_piece(c, prefix);
  double v = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j)
    if (idx[j] == idx[j - 1] + 1) v += std::abs(angle_increment(c.vertex(idx[j - 1]), c.vertex(idx[j]), 0.0));
  return v;
}

}  // namespace

TEST_CASE("circle and ellipse") {
  CHECK(std::abs(make_circle(1.0).length() - kTwoPi) <= 1e-6);
  const Curve e = make_ellipse(1.0, 1.0);
  const Curve c = make_circle(1.0);
  REQUIRE(e.segment_count() == c.segment_count());
  double diff = 0.0;
  for (std::size_t i = 0; i <= c.segment_count(); ++i) diff = std::max(diff, std::abs(e.vertex(i) - c.vertex(i)));
  CHECK(diff <= 1e-9);
  CHECK(std::abs(make_ellipse(2.0, 1.0).signed_area() - kTwoPi) <= 1e-5);
  CHECK_THROWS_AS(make_circle(-1.0), ConfigError);
}

TEST_CASE("zoo names") {
  CHECK(canonical_zoo_name("ex1") == "example1");
  CHECK(canonical_zoo_name("lyapunov") == "lyapunov_blob");
  ZooSpec bad;
  bad.name = "trefoil";
  CHECK_THROWS_AS(make_zoo(bad), ConfigError);
  ZooSpec shallow;
  shallow.name = "ex1";
  shallow.depth = 1;
  CHECK_THROWS_AS(make_zoo(shallow), ConfigError);
}

TEST_CASE("example 1") {
  for (int N = 2; N <= 6; ++N) {
    CAPTURE(N);
    CHECK_NOTHROW(make_example1(N));
  }
  CHECK(std::abs(make_example1(2).length() - make_example1(3).length()) <= 0.125);
  const Curve c = make_example1(6);
  CHECK(c.resolved_scale() == std::ldexp(1.0, -12));
  // Variation of arg t over the retained pieces stays below pi + 3/2.
  CHECK(total_arg_variation(c, 0.0).value <= kPi + 1.5);
  const double V = total_arg_variation(c, 0.0).value;
  for (cplx xi : vertex_sample(c, 6)) CHECK(total_arg_variation(c, xi).value <= 2.0 * V + kTwoPi);
}

TEST_CASE("example 2 geometry") {
  const Example2Geometry g = example2_geometry();
  CHECK(std::abs(example2_spiral_derivative(g.r0).real()) <= 1e-10);
  // r0 is the smallest root: Re t' keeps its sign below it.
  for (double r = 1e-6; r < 0.99 * g.r0; r *= 1.5) CHECK(example2_spiral_derivative(r).real() > 0.0);

  const Curve c = make_example2();
  const auto& pieces = c.generator()->pieces;
  REQUIRE(pieces.size() == 3);
  // Glue at t(r0): the spiral's end tangent continues into the ellipse.
  CHECK(angle_between(end_direction(pieces[1]), start_direction(pieces[2])) <= 1e-6);
  CHECK(angle_between(example2_spiral_derivative(g.r0), start_direction(pieces[2])) <= 1e-6);
  // At 0 the ellipse arrives horizontally; the spiral leaves with a tangent
  // angle that tends to 0 like 1 / |ln r|.
  CHECK(angle_between(end_direction(pieces[2]), cplx(1.0, 0.0)) <= 1e-6);
  const double L = std::log(g.r_min);
  CHECK(std::abs(std::arg(example2_spiral_derivative(g.r_min))) <= 1.0 / std::abs(L) + 1.0 / (L * L));
  for (double r : {1e-10, 1e-30, 1e-60}) {
    const double a = std::abs(std::arg(example2_spiral_derivative(r)));
    CHECK(a < std::abs(std::arg(example2_spiral_derivative(r * 1e5))));
  }
  // Arc coordinates stay strictly increasing despite the graded mesh at 0.
  const auto& arc = c.arc_coords();
  bool increasing = true;
  for (std::size_t i = 1; i < arc.size(); ++i) increasing = increasing && arc[i] > arc[i - 1];
  CHECK(increasing);
}

TEST_CASE("example 3") {
  const EllipseGlue el = example3_ellipse();
  CHECK(el.a > 0.0);
  CHECK(el.b > 0.0);
  const Curve c = make_example3(8);
  const auto& pieces = c.generator()->pieces;
  REQUIRE(pieces.size() == 3);
  CHECK(angle_between(end_direction(pieces[1]), start_direction(pieces[2])) <= 1e-6);
  CHECK(angle_between(example3_arc_derivative(0.5), start_direction(pieces[2])) <= 1e-6);
  CHECK(angle_between(end_direction(pieces[2]), cplx(1.0, 0.0)) <= 1e-6);

  // Partial arg variation over the oscillating arc grows with the depth and
  // dominates half of sum 1 / (n ln n).
  double prev = 0.0;
  for (int N : {4, 6, 8}) {
    const Curve cn = N == 8 ? c : make_example3(N);
    const double v = piece_arg_variation(cn, "oscillating arc");
    CHECK(v >= 0.5 * sum_inverse_nlogn(N));
    CHECK(v > prev);
    prev = v;
  }

  // arg t = (r / |ln r|) cos(pi / r) is Hoelder-1/2 along the arc: the
  // quotient |arg t1 - arg t2| / |t1 - t2|^{1/2} stays bounded on a sample.
  auto arg_of = [](double r) { return (r / std::abs(std::log(r))) * std::cos(kPi / r); };
  std::vector<double> rs;
  for (double r = std::ldexp(1.0, -16); r < 0.5; r *= 1.003) rs.push_back(r);
  double worst = 0.0;
  for (std::size_t i = 0; i < rs.size(); i += 3)
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      const double d = std::abs(example3_arc(rs[i]) - example3_arc(rs[j]));
      worst = std::max(worst, std::abs(arg_of(rs[i]) - arg_of(rs[j])) / std::sqrt(d));
    }
  CHECK(std::isfinite(worst));
  CHECK(worst < 10.0);
}

TEST_CASE("example 4 density and regularity") {
  const Density g = make_density_example4();
  CHECK(g(cplx(std::exp(-1.0), 0.0), 0.0) == doctest::Approx(0.5));
  CHECK(g(cplx(0.0, std::exp(-1.0)), 0.0) == doctest::Approx(0.5));
  CHECK(g(0.0, 0.0) == 0.0);
  double prev = 1.0;
  for (int k = 1; k <= 300; k += 20) {
    const double v = g(std::pow(10.0, -k), 0.0);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
  CHECK(prev < 2e-3);

  const Curve c = make_example4(8);
  const double bound = 4.0 + std::sqrt(1.0 + std::log(2.0) * std::log(2.0)) / std::log(2.0);
  for (int k = 3; k <= 10; ++k) {
    const double eps = std::ldexp(1.0, -k);
    CHECK(neighborhood_measure(c, 0.0, eps) / eps <= bound);
  }
}

TEST_CASE("lyapunov blob") {
  const Curve round = make_lyapunov_blob(0.0, 0.5);
  double off = 0.0;
  for (const cplx& z : round.vertices()) off = std::max(off, std::abs(std::abs(z) - 1.0));
  CHECK(off <= 1e-12);
  CHECK_THROWS_AS(make_lyapunov_blob(0.7, 0.5), ConfigError);

  const Curve blob = make_lyapunov_blob(0.1, 0.5);
  const KralCheck k = kral_check(blob, vertex_sample(blob, 8));
  CHECK(k.pass);
  const ModulusTable t = tangent_modulus(blob, log_grid(1e-4, 0.1, 8));
  double c = 0.0;
  for (std::size_t i = 0; i < t.eta.size(); ++i) c = std::max(c, t.omega[i] / std::pow(t.eta[i], 0.5));
  CHECK(std::isfinite(c));
  CHECK(c < 100.0);
}

TEST_CASE("zoo curves are simple, positive and regular where expected") {
  for (const auto& name : zoo_names()) {
    CAPTURE(name);
    ZooSpec spec;
    spec.name = name;
    spec.depth = 4;
    const Curve c = make_zoo(spec);
    CHECK(c.signed_area() > 0.0);
    CHECK_FALSE(find_self_intersection(c.vertices()).has_value());
  }
  std::vector<double> eps;
  for (int k = 1; k <= 8; ++k) eps.push_back(std::ldexp(1.0, -k));
  CHECK(ahlfors_check(make_example1(6), eps, 64).pass);
  CHECK(ahlfors_check(make_example4(6), eps, 64).pass);
  const double k4 = kral_functional(make_example3(4), 0.0);
  const double k6 = kral_functional(make_example3(6), 0.0);
  CHECK(k6 > k4);
}
