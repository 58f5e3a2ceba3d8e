#pragma once

#include <string>
#include <utility>
#include <vector>

#include "layerpot/arg_tracker.hpp"
#include "layerpot/curve.hpp"
#include "layerpot/density.hpp"

namespace layerpot {

struct QuadratureOptions {
  double tol = 1e-10;
  // Extra refinement passes; each halves the subtended-angle and chord limits
  // and stops once two passes agree within tol * max(1, 1 / dist(z, curve)).
  int max_refine = 1;
};

// (1 / 2 pi i) times the contour integral of g(t) / (t - z) along the polyline.
// Segments are split until each piece subtends at most pi/64 at z and is
// shorter than 1/8 of its distance to z; g is linear on each piece.
cplx cauchy_integral(const Curve& curve, const Density& g, cplx z, const QuadratureOptions& options = {});

// Exact value for the piecewise-linear interpolant of vertex values gv.
cplx cauchy_integral(const Curve& curve, const std::vector<double>& gv, cplx z);

double double_layer_potential(const Curve& curve, const Density& g, cplx z, const QuadratureOptions& options = {});
double double_layer_potential(const Curve& curve, const std::vector<double>& gv, cplx z);

struct PVResult {
  cplx value{};  // order-1 extrapolation of the last two partials
  std::vector<std::pair<double, cplx>> trace;  // (delta_k, partial integral)
  double tolerance = 0.0;
  bool re_converged = false;
  bool im_converged = false;
  bool converged = false;  // both parts
  TraceStatus re_status = TraceStatus::Inconclusive;
  TraceStatus im_status = TraceStatus::Inconclusive;
  double g_xi = 0.0;
};

// Partials of the integral of (g(t) - g(xi)) / (t - xi) dt over the curve
// outside |t - xi| <= delta_k, for the piecewise-linear interpolant of g. With
// an automatic schedule the sweep continues 20 halvings below the local mesh.
PVResult pv_reduced_singular(const Curve& curve, const std::vector<double>& gv, cplx xi, const Schedule& schedule = {},
                             const ConvergencePolicy& policy = {});
PVResult pv_reduced_singular(const Curve& curve, const Density& g, cplx xi, const Schedule& schedule = {},
                             const ConvergencePolicy& policy = {});

struct SokhotskiResult {
  bool full = false;  // complex values available
  cplx plus{};
  cplx minus{};
  double re_plus = 0.0;
  double re_minus = 0.0;
  double g_xi = 0.0;
  PVResult pv;
};

// Throws NonConvergenceError when neither part of the PV converges.
SokhotskiResult sokhotski_values(const Curve& curve, const Density& g, cplx xi, const Schedule& schedule = {},
                                 const ConvergencePolicy& policy = {});

enum class Side { Plus = 1, Minus = -1 };

struct ApproachOptions {
  double h0 = 0.0;  // 0: min(diameter / 8, 8 * shorter adjacent segment)
  int levels = 12;
};

struct BoundaryValueResult {
  cplx xi{};
  Side side = Side::Plus;
  cplx direction{};
  bool reaimed = false;
  std::vector<std::pair<double, double>> approach;  // (h_k, Re g(xi + h_k direction))
  std::vector<double> extrapolants;                 // index k >= 1 uses h_{k-1}, h_k
  double limit = 0.0;
  double formula = 0.0;
  double discrepancy = 0.0;
  // Extrapolants within 1e-6 + 1e-3 omega(g, h_k) of each other.
  bool converged = false;
  // Converged, or the last three extrapolant changes shrink monotonically.
  bool stabilized = false;
  double last_change = 0.0;
  double g_xi = 0.0;
};

// Limit of Re g along a straight approach from D+ (side Plus) or D- to the
// curve point nearest xi, for the piecewise-linear interpolant of g. The
// formula value uses the exact principal arg-Stieltjes integral of the same
// interpolant. Throws DomainError when no approach direction stays in D+-.
BoundaryValueResult boundary_limit(const Curve& curve, const Density& g, cplx xi, Side side,
                                   const ApproachOptions& options = {});

struct CriterionOptions {
  int delta_levels = 12;  // delta_j = eps 2^-j, j = 1..delta_levels
  unsigned threads = 1;
};

// sup over xi_grid and delta_grid of |integral of (g - g(xi)) d arg(t - xi)
// over delta < |t - xi| <= eps|. Grid entries outside (0, eps) are ignored.
double criterion_functional(const Curve& curve, const Density& g, double eps, const std::vector<cplx>& xi_grid,
                            const std::vector<double>& delta_grid, unsigned threads = 1);

struct CriterionRow {
  double eps = 0.0;
  double value = 0.0;
  cplx argmax{};
};
std::vector<CriterionRow> criterion_sweep(const Curve& curve, const Density& g, const std::vector<double>& eps,
                                          const std::vector<cplx>& xi_grid, const CriterionOptions& options = {});

// ---------------------------------------------------------------------------
// Grid sweeps and exports

struct FieldGrid {
  double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
  int nx = 64, ny = 64;
};

struct FieldPoint {
  double x = 0.0, y = 0.0;
  cplx value{};
  int winding = 0;
  bool on_curve = false;
};

std::vector<FieldPoint> potential_field(const Curve& curve, const Density& g, const FieldGrid& grid,
                                        unsigned threads = 1, const QuadratureOptions& options = {});
void write_field_csv(const std::string& path, const std::vector<FieldPoint>& field);

struct BoundarySweepRow {
  double s = 0.0;
  double g_xi = 0.0;
  double plus_formula = 0.0, plus_limit = 0.0;
  double minus_formula = 0.0, minus_limit = 0.0;
  double jump = 0.0;
  bool converged = false;
  bool stabilized = false;
  bool pv_full = false;
};

std::vector<BoundarySweepRow> boundary_sweep(const Curve& curve, const Density& g, const std::vector<cplx>& xi,
                                             const ApproachOptions& options = {}, unsigned threads = 1);
void write_boundary_csv(const std::string& path, const std::vector<BoundarySweepRow>& rows);
void write_criterion_csv(const std::string& path, const std::vector<CriterionRow>& rows);

}  // namespace layerpot
