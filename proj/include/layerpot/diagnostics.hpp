#pragma once

#include <functional>
#include <string>
#include <vector>

#include "layerpot/arg_tracker.hpp"
#include "layerpot/curve.hpp"
#include "layerpot/density.hpp"

namespace layerpot {

// ---------------------------------------------------------------------------
// Base point samples

// About `count` vertices spread evenly along the curve (all of them when
// count is 0 or exceeds the vertex count), followed by the generator anchors
// that lie on the curve. With resolved_only, vertices closer to an anchor than
// the resolved scale (the truncation stitch) are dropped.
std::vector<cplx> vertex_sample(const Curve& curve, std::size_t count = 0, bool resolved_only = false);

// Indices of the vertices produced by generator pieces whose label starts with `prefix`.
std::vector<std::size_t> vertices_on_piece(const Curve& curve, const std::string& prefix);

// ---------------------------------------------------------------------------
// Ahlfors regularity: theta_xi(eps) = mes{t : |t - xi| <= eps}

double neighborhood_measure(const Curve& curve, cplx xi, double eps);

struct RegularityReport {
  std::vector<double> eps;
  std::vector<double> theta;  // sup over the xi sample
  std::vector<double> ratio;  // theta / eps
  std::vector<cplx> argmax;
  double constant = 0.0;  // max ratio
  std::size_t xi_count = 0;
};

RegularityReport theta_report(const Curve& curve, const std::vector<double>& eps, const std::vector<cplx>& xi,
                              unsigned threads = 1);

// ---------------------------------------------------------------------------
// Ray crossings and the Kral functional

inline constexpr double kRayJitter = 1e-7;

// Transversal crossings of the open ray xi + r e^{i phi}, r > 0. Rays through a
// vertex or along a segment are recast at phi + 1e-7 until generic.
int ray_crossings(const Curve& curve, cplx xi, double phi);

// Periodic trapezoid estimate of the integral of mu(xi, phi) over [0, 2 pi)
// on `directions` equally spaced rays (at least 360).
double kral_functional(const Curve& curve, cplx xi, int directions = 3600);

// Crossing counts on the whole direction grid phi_j = 2 pi j / directions.
std::vector<int> crossing_profile(const Curve& curve, cplx xi, int directions);

struct KralReport {
  std::vector<cplx> xi;
  std::vector<double> values;
  double sup = 0.0;
  int directions = 0;
};

KralReport kral_report(const Curve& curve, const std::vector<cplx>& xi, int directions = 3600, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Sector-annulus oscillations and angular shadows

// Pieces of the curve inside R/2 < |t - xi| < R, each with the unwrapped
// argument of t - xi at its chain points.
struct AnnulusPiece {
  std::vector<cplx> points;
  std::vector<double> theta;
};

std::vector<AnnulusPiece> annulus_pieces(const Curve& curve, cplx xi, double R);

// Components of the curve inside E^{R,psi1,psi2}(xi) whose ends sit on the two
// different radial sides. Requires 0 <= psi1 < psi2 < 2 pi.
int oscillation_count(const Curve& curve, cplx xi, double R, double psi1, double psi2);
int oscillation_count(const std::vector<AnnulusPiece>& pieces, double psi1, double psi2);

// Sector pairs: widths 2 pi 2^-j (j = 1..levels), start angles stepped by
// width / offsets, kept inside [0, 2 pi).
struct SectorResolution {
  int levels = 6;
  int offsets = 4;
};
std::vector<std::pair<double, double>> sector_pairs(const SectorResolution& res);

// max(1, max over the sampled sector pairs of the oscillation count).
int k_gamma(const Curve& curve, cplx xi, double R, const SectorResolution& res = {});
int k_gamma(const std::vector<AnnulusPiece>& pieces, const SectorResolution& res = {});

// Measure of directions whose rays meet the curve inside R/2 < |t - xi| <= R,
// from the union of the angular shadows of the clipped segments.
double phi_gamma(const Curve& curve, cplx xi, double R);
// The same measure by ray casting on a grid of `directions` rays.
double phi_gamma_grid(const Curve& curve, cplx xi, double R, int directions = 3600);

struct OscillationProfile {
  cplx xi{};
  std::vector<double> R;
  std::vector<int> k;
  std::vector<double> phi;
  std::vector<int> k_hat;
  std::vector<double> phi_hat;
  SectorResolution resolution;
  int hat_points = 8;
};

// Hats take the max over `hat_points` radii spread over [R/2, R].
OscillationProfile oscillation_profile(const Curve& curve, cplx xi, const std::vector<double>& R,
                                       const SectorResolution& res = {}, int hat_points = 8);

// ---------------------------------------------------------------------------
// Moduli of continuity

struct ModulusTable {
  std::string label;
  std::vector<double> eta;    // increasing
  std::vector<double> omega;  // nondecreasing
  std::size_t samples = 0;

  // Value at the largest grid point <= x (0 below the grid).
  double at(double x) const;
};

// omega(eta_k) = max |f_i - f_j| over sample pairs with |p_i - p_j| <= eta_k.
// `angular` compares values modulo 2 pi.
ModulusTable modulus_of_continuity(const std::vector<cplx>& points, const std::vector<double>& values,
                                   std::vector<double> eta, bool angular = false, unsigned threads = 1,
                                   std::string label = {});

// Density values at up to `max_points` vertices (0: all).
ModulusTable density_modulus(const Curve& curve, const Density& g, std::vector<double> eta, std::size_t max_points = 0,
                             unsigned threads = 1);

// Tangent angle at segment midpoints.
ModulusTable tangent_modulus(const Curve& curve, std::vector<double> eta, std::size_t max_points = 0,
                             unsigned threads = 1);

// sup over eta in [a, b] of omega(eta) / eta, from the grid points inside
// [a, b] and the step values at a and b.
double omega_characteristic(const ModulusTable& table, double a, double b);

// Largest violation of the three monotonicity properties of Omega over all grid
// pairs a <= b (relative to the compared values); 0 when all hold.
double omega_monotonicity_defect(const ModulusTable& table);

enum class DiniKind { Plain, LogWeighted, Tangent, Arg };
std::string to_string(DiniKind k);

struct DiniResult {
  DiniKind kind = DiniKind::Plain;
  double upper = 1.0;
  double value = 0.0;  // partial integral down to the smallest lower limit
  TraceStatus status = TraceStatus::Inconclusive;
  Trace trace;  // (lower limit, partial integral), lower limits halving
};

// Integral of omega(eta)/eta (times ln(2/eta) for LogWeighted) from each lower
// limit up to `upper`, by the trapezoid rule in ln(eta) on the table grid.
DiniResult dini_integral(const ModulusTable& table, DiniKind kind, double upper = 1.0, double resolved_scale = 0.0,
                         const ConvergencePolicy& policy = {});

// ---------------------------------------------------------------------------
// Sufficient conditions with unbounded arg variation

struct Partition {
  std::function<bool(cplx)> in_first;     // gamma^1 membership
  std::function<double(cplx)> radius;     // r(xi) for xi in gamma^2
  double R0 = 0.5;
  std::string description;
};

enum class Theorem3Variant { Theorem3, Corollary1 };
std::string to_string(Theorem3Variant v);

struct Theorem3Settings {
  Theorem3Variant variant = Theorem3Variant::Corollary1;
  int points_per_octave = 8;
  double lower_limit = 0.0;  // 0: a quarter of the resolved scale, or 1e-6 R0
  SectorResolution sectors{};
  int hat_points = 8;
  double stability_tol = 0.05;
  unsigned threads = 1;
};

struct Theorem3Row {
  cplx xi{};
  int part = 1;
  double r = 0.0;
  double variation = 0.0;  // V over gamma_r(xi), part 2 only
  TraceStatus variation_status = TraceStatus::Inconclusive;
  double integral = 0.0;
  double integral_refined = 0.0;
  TraceStatus integral_status = TraceStatus::Inconclusive;
  double total = 0.0;
  bool finite = false;
  bool stable = false;
};

struct Theorem3Report {
  Theorem3Settings settings;
  std::vector<Theorem3Row> rows;
  double sup_first = 0.0;            // sup of the gamma^1 integrals
  double sup_second = 0.0;           // sup of V + integral on gamma^2
  double sup_second_integral = 0.0;  // sup of the gamma^2 integrals alone
  double sup_variation = 0.0;
  bool pass = false;
};

// `omega` is the modulus of g over the whole curve; its grid must reach down
// to the lower integration limit.
Theorem3Report theorem3_report(const Curve& curve, const ModulusTable& omega, const Partition& partition,
                               const std::vector<cplx>& xi, const Theorem3Settings& settings = {});

enum class LemmaKind { Lemma2, Lemma3 };

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;  // Lemma 3: the bracket without the constant
  double ratio = 0.0;
  int k = 1;
  double phi = 0.0;
  double omega_char = 0.0;
};

// Lemma 2 on the annulus R/2 < |t - xi| <= R (eps ignored), or Lemma 3 on
// delta = R < |t - xi| <= eps.
LemmaCheck lemma_inequality_check(const Curve& curve, const Density& g, const ModulusTable& omega, cplx xi, double R,
                                  LemmaKind which, double eps = 0.0, const SectorResolution& sectors = {},
                                  int hat_points = 8);

// ---------------------------------------------------------------------------
// Curve class checks

struct AhlforsCheck {
  double constant = 0.0;
  double constant_refined = 0.0;  // with twice the base point density
  bool pass = false;
  RegularityReport report;  // base run
};
AhlforsCheck ahlfors_check(const Curve& curve, const std::vector<double>& eps, std::size_t xi_count,
                           double stability_tol = 0.05, unsigned threads = 1);

struct KralCheck {
  double sup_variation = 0.0;
  double sup_functional = 0.0;
  double sup_functional_refined = 0.0;
  std::vector<TraceStatus> statuses;
  std::vector<double> variation;  // per base point
  std::vector<double> functional;
  std::vector<double> functional_refined;
  bool pass = false;
};
KralCheck kral_check(const Curve& curve, const std::vector<cplx>& xi, int directions = 3600,
                     double stability_tol = 0.05, unsigned threads = 1);

}  // namespace layerpot
