#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "layerpot/diagnostics.hpp"
#include "layerpot/integrals.hpp"
#include "layerpot/zoo.hpp"

using namespace layerpot;

namespace {

std::vector<cplx> sample_points(const Curve& c, int n, bool inside, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const BBox& b = c.bbox();
  std::uniform_real_distribution<double> ux(b.xmin - 1.0, b.xmax + 1.0), uy(b.ymin - 1.0, b.ymax + 1.0);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < n) {
    const cplx z(ux(rng), uy(rng));
    if ((winding_number(c, z) != 0) == inside && distance_to_curve(c, z) > 1e-3) out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("constant density") {
  const Curve c = make_circle(1.0);
  const Density one = Density::constant(1.0);
  CHECK(std::abs(cauchy_integral(c, one, cplx(0.3, 0.1)) - 1.0) <= 1e-8);
  CHECK(std::abs(cauchy_integral(c, one, 3.0)) <= 1e-8);
  const Curve ex1 = make_example1(6);
  for (cplx z : sample_points(ex1, 10, true, 1)) CHECK(std::abs(double_layer_potential(ex1, one, z) - 1.0) <= 1e-8);
  for (cplx z : sample_points(ex1, 10, false, 2)) CHECK(std::abs(double_layer_potential(ex1, one, z)) <= 1e-8);
}

TEST_CASE("residue oracles for Re t on the unit circle") {
  const Curve c = make_circle(1.0, {1e-4});
  const Density re = Density::real_part();
  for (cplx z : {cplx(0.3, 0.1), cplx(-0.5, 0.2), cplx(0.0, -0.7)})
    CHECK(std::abs(cauchy_integral(c, re, z) - z / 2.0) <= 1e-7);
  // Outside only the pole at 0 of (t + 1/t) / (2 (t - z)) contributes.
  for (cplx z : {cplx(2.0, 0.0), cplx(0.0, 3.0), cplx(-1.5, 1.5)})
    CHECK(std::abs(cauchy_integral(c, re, z) + 1.0 / (2.0 * z)) <= 1e-7);
  CHECK(std::abs(double_layer_potential(c, re, 0.4) - 0.2) <= 1e-7);
}

TEST_CASE("vertex-value overloads agree with densities on linear data") {
  const Curve c = make_ellipse(2.0, 1.0);
  const Density re = Density::real_part();
  const auto gv = re.at_vertices(c);
  for (cplx z : {cplx(0.5, 0.2), cplx(3.0, 1.0)}) {
    CHECK(std::abs(cauchy_integral(c, re, z) - cauchy_integral(c, gv, z)) <= 1e-10);
    CHECK(std::abs(double_layer_potential(c, re, z) - double_layer_potential(c, gv, z)) <= 1e-10);
  }
}

TEST_CASE("example 4 log density gives finite potentials") {
  const Curve c = make_example4(6);
  const Density g = make_density_example4();
  const cplx z(-0.5, 0.3);
  const cplx v = cauchy_integral(c, g, z);
  CHECK(std::isfinite(v.real()));
  CHECK(std::isfinite(v.imag()));
  CHECK(double_layer_potential(c, g, z) == v.real());
}

TEST_CASE("linearity") {
  const Curve c = make_lyapunov_blob(0.1, 0.5);
  const Density f = Density::real_part(), h = Density::holder(0.5, 0.1);
  const Density comb = Density::combination(2.0, f, -3.0, h);
  for (cplx z : {cplx(0.1, 0.2), cplx(2.0, -1.0)}) {
    const cplx lhs = cauchy_integral(c, comb, z);
    const cplx rhs = 2.0 * cauchy_integral(c, f, z) - 3.0 * cauchy_integral(c, h, z);
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("harmonicity and decay") {
  const Curve c = make_example4(6);
  const Density g = make_density_example4();
  for (cplx z : sample_points(c, 5, true, 3)) {
    const double rho = 1e-2 * distance_to_curve(c, z);
    double avg = 0.0;
    for (int k = 0; k < 4; ++k) avg += double_layer_potential(c, g, z + std::polar(rho, k * kPi / 2)) / 4.0;
    CHECK(std::abs(avg - double_layer_potential(c, g, z)) <= 1e-6);
  }
  auto scaled_max = [&](double R) {
    double m = 0.0;
    for (int k = 0; k < 16; ++k) {
      const cplx z = std::polar(R, kTwoPi * k / 16);
      m = std::max(m, std::abs(cauchy_integral(c, g, z)) * R);
    }
    return m;
  };
  const double d = c.diameter();
  const double a = scaled_max(10 * d), b = scaled_max(20 * d);
  CHECK(std::abs(a - b) <= 0.1 * b);
}

TEST_CASE("principal value") {
  const Curve c = make_circle(1.0);
  const PVResult flat = pv_reduced_singular(c, Density::constant(2.0), 1.0);
  for (const auto& [d, v] : flat.trace) CHECK(std::abs(v) == 0.0);
  CHECK(flat.converged);

  const PVResult re = pv_reduced_singular(c, Density::real_part(), 1.0);
  CHECK(re.im_converged);
  CHECK(std::abs(re.value.imag() + kPi) <= 1e-4);
  // Route through the midpoint Stieltjes rule at a small radius.
  CHECK(std::abs(stieltjes_arg_integral(c, Density::real_part(), 1.0, 1e-6) - re.value.imag()) <= 1e-4);

  const Curve ex4 = make_example4(8);
  const PVResult p4 = pv_reduced_singular(ex4, make_density_example4(), 0.0);
  CHECK(p4.im_converged);
}

TEST_CASE("Sokhotski values") {
  const Curve c = make_circle(1.0);
  const SokhotskiResult one = sokhotski_values(c, Density::constant(1.0), cplx(0.0, 1.0));
  REQUIRE(one.full);
  CHECK(std::abs(one.plus - 1.0) <= 1e-9);
  CHECK(std::abs(one.minus) <= 1e-9);

  const SokhotskiResult re = sokhotski_values(c, Density::real_part(), 1.0);
  CHECK(std::abs(re.re_plus - 0.5) <= 1e-4);
  CHECK(std::abs(re.re_minus + 0.5) <= 1e-4);
  CHECK(std::abs((re.re_plus - re.re_minus) - re.g_xi) <= 1e-12);
}

TEST_CASE("boundary limits") {
  const Density one = Density::constant(1.0);
  for (const Curve& c : {make_circle(1.0), make_example1(6)}) {
    const cplx xi = c.vertex(c.segment_count() / 3);
    const BoundaryValueResult p = boundary_limit(c, one, xi, Side::Plus);
    const BoundaryValueResult m = boundary_limit(c, one, xi, Side::Minus);
    CHECK(std::abs(p.limit - 1.0) <= 1e-6);
    CHECK(std::abs(m.limit) <= 1e-6);
    CHECK(p.discrepancy <= 1e-6);
  }
  const Curve c = make_circle(1.0);
  const BoundaryValueResult p = boundary_limit(c, Density::real_part(), 1.0, Side::Plus);
  CHECK(std::abs(p.limit - 0.5) <= 1e-4);
  CHECK(p.converged);
  const BoundaryValueResult m = boundary_limit(c, Density::real_part(), 1.0, Side::Minus);
  // Jump relation: the limits differ from the formula values by at most their discrepancies.
  CHECK(std::abs(p.limit - m.limit - p.g_xi) <= p.discrepancy + m.discrepancy + 1e-12);

  const Density g = make_density_example4();
  double prev = 1e9;
  for (int N : {6, 8}) {
    const Curve ex4 = make_example4(N);
    const BoundaryValueResult bp = boundary_limit(ex4, g, 0.0, Side::Plus);
    const BoundaryValueResult bm = boundary_limit(ex4, g, 0.0, Side::Minus);
    CHECK(bp.stabilized);
    CHECK(bm.stabilized);
    const double worst = std::max(bp.discrepancy, bm.discrepancy);
    CHECK(worst <= 1e-2);
    CHECK(worst <= prev);
    prev = worst;
  }
}

TEST_CASE("criterion functional") {
  const Curve c = make_circle(1.0);
  const auto xi = vertex_sample(c, 16, true);
  std::vector<double> eps;
  for (int k = 2; k <= 7; ++k) eps.push_back(std::ldexp(1.0, -k));
  const auto flat = criterion_sweep(c, Density::constant(1.0), eps, xi);
  for (const auto& r : flat) CHECK(r.value == 0.0);
  const auto rows = criterion_sweep(c, Density::real_part(), eps, xi);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].value < rows[i - 1].value);

  const Curve ex4 = make_example4(6);
  const auto r4 = criterion_sweep(ex4, make_density_example4(), eps, vertex_sample(ex4, 16, true));
  for (std::size_t i = 1; i < r4.size(); ++i) CHECK(r4[i].value < r4[i - 1].value);

  // The direct functional on explicit grids matches the sweep's inner loop.
  std::vector<double> deltas;
  for (int j = 1; j <= 12; ++j) deltas.push_back(eps[0] * std::ldexp(1.0, -j));
  CHECK(criterion_functional(c, Density::real_part(), eps[0], xi, deltas) == doctest::Approx(rows[0].value));
}

TEST_CASE("field and csv exports") {
  const Curve c = make_circle(1.0);
  FieldGrid grid;
  grid.nx = grid.ny = 9;
  const auto field = potential_field(c, Density::real_part(), grid);
  REQUIRE(field.size() == 81);
  for (const auto& p : field) {
    if (p.on_curve) continue;
    const cplx z(p.x, p.y);
    const cplx expect = p.winding ? z / 2.0 : -1.0 / (2.0 * z);
    CHECK(std::abs(p.value - expect) <= 1e-6);
  }
  const auto dir = std::filesystem::temp_directory_path() / "layerpot_integrals_test";
  std::filesystem::create_directories(dir);
  write_field_csv((dir / "field.csv").string(), field);
  std::ifstream in(dir / "field.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,re,im,inside");
  const auto rows = boundary_sweep(c, Density::real_part(), vertex_sample(c, 4));
  for (const auto& r : rows) CHECK(std::abs(r.jump - r.g_xi) <= 1e-3);
  write_boundary_csv((dir / "boundary.csv").string(), rows);
  CHECK(std::filesystem::file_size(dir / "boundary.csv") > 0);
  CHECK_THROWS_AS(write_field_csv((dir / "missing" / "x.csv").string(), field), ConfigError);
  std::filesystem::remove_all(dir);
}
