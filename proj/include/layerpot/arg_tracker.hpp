#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "layerpot/curve.hpp"
#include "layerpot/density.hpp"

namespace layerpot {

enum class TraceStatus { Converged, Divergent, Inconclusive };
std::string to_string(TraceStatus s);

// Shared classification rule for truncation sweeps (arg variations, Dini
// integrals, Stieltjes traces).
struct ConvergencePolicy {
  double tol = 1e-6;
  int window = 3;
};

// deltas strictly decreasing, values[k] the partial quantity at deltas[k].
// Divergent: inside the resolved range (delta >= resolved_scale) the last
// `window` two-level increments V_k - V_{k-2} exceed 2 tol and their
// log-scaled sizes m_k (V_k - V_{k-2}), m_k = log2(delta_0/delta_k), do not
// fall faster than a relative 1/(2 m_k) per level. Increments decaying like
// m^-p are therefore called divergent for p < 3/2.
// Converged: otherwise, if the final increment is below tol.
TraceStatus classify_trace(const std::vector<double>& deltas, const std::vector<double>& values, double resolved_scale,
                           const ConvergencePolicy& policy = {});

struct ArgSample {
  double s = 0.0;    // arc coordinate (may exceed the length when the arc wraps)
  double arg = 0.0;  // unwrapped arg(t - xi)
};

struct ArgBranch {
  cplx base{};
  std::vector<ArgSample> samples;
  double subtended_max = 0.0;
  double increment() const { return samples.empty() ? 0.0 : samples.back().arg - samples.front().arg; }
};

// Continuous branch of arg(t - xi) along the arc [s_begin, s_end] (s_end > s_begin, may wrap once).
ArgBranch track_arg(const Curve& curve, double s_begin, double s_end, cplx xi);
// Branches along the pieces of the curve outside the closed disk |t - xi| <= delta.
std::vector<ArgBranch> track_arg_outside(const Curve& curve, cplx xi, double delta);

// Total variation of arg(t - xi) over {t : delta < |t - xi| <= eps}.
double arg_variation(const Curve& curve, cplx xi, double delta,
                     double eps = std::numeric_limits<double>::infinity());

struct Schedule {
  double delta0 = 0.0;  // 0: the curve diameter
  int count = 0;        // 0: chosen from the local mesh scale at xi
};

using Trace = std::vector<std::pair<double, double>>;

struct VariationResult {
  double value = 0.0;
  TraceStatus status = TraceStatus::Inconclusive;
  Trace trace;  // (delta_k, V_k)
};

std::vector<double> schedule_deltas(const Curve& curve, cplx xi, const Schedule& schedule);
// Variation over {delta_k < |t - xi| <= eps} along the schedule; delta0 defaults
// to min(eps, diameter).
VariationResult total_arg_variation(const Curve& curve, cplx xi, const Schedule& schedule = {},
                                    const ConvergencePolicy& policy = {},
                                    double eps = std::numeric_limits<double>::infinity());

// Integral of (g(t) - g(xi)) d arg(t - xi) over delta < |t - xi| <= eps by the
// refined midpoint rule. delta must be positive and below eps.
double stieltjes_arg_integral(const Curve& curve, const Density& g, cplx xi, double delta,
                              double eps = std::numeric_limits<double>::infinity());

// As above with g(xi) supplied, optionally restricted to a list of segment indices.
double stieltjes_arg_integral_at(const Curve& curve, const Density& g, cplx xi, double gxi, double delta, double eps,
                                 const std::vector<std::size_t>* segments = nullptr);

// Same integral for the piecewise-linear interpolant of vertex values gv,
// evaluated in closed form as Im of the segment Cauchy formula. delta = 0 gives
// the principal limit for the polyline.
double stieltjes_arg_integral_exact(const Curve& curve, const std::vector<double>& gv, cplx xi, double gxi,
                                    double delta, double eps = std::numeric_limits<double>::infinity());

// Value of the piecewise-linear interpolant of gv at the curve point nearest xi.
double interpolate_at(const Curve& curve, const std::vector<double>& gv, cplx xi);

void write_trace_csv(const std::string& path, const std::string& value_column, const Trace& trace);

}  // namespace layerpot
