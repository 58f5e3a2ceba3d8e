#include "layerpot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "layerpot/kernels.hpp"

namespace layerpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(cplx x, cplx y) { return x.real() * y.imag() - x.imag() * y.real(); }
double dot(cplx x, cplx y) { return x.real() * y.real() + x.imag() * y.imag(); }

cplx lerp(cplx a, cplx b, double u) { return u == 0.0 ? a : (u == 1.0 ? b : a + u * (b - a)); }

double angle_0_2pi(cplx z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

bool is_base_point(cplx p, cplx xi) { return std::abs(p - xi) <= 1e-14 * (1.0 + std::abs(xi)); }

// Angular shadow of a segment seen from xi as [lo, hi) with lo in [0, 2 pi),
// hi - lo < pi. False when the segment passes through xi.
bool shadow(cplx a, cplx b, cplx xi, double theta_a, double theta_b, double& lo, double& hi) {
  if (is_base_point(a, xi) || is_base_point(b, xi)) return false;
  const double w = angle_increment(a, b, xi);
  if (std::abs(w) >= kPi - 1e-12) return false;
  if (w == 0.0) return false;
  if (w > 0.0) {
    lo = theta_a;
    hi = theta_b;
  } else {
    lo = theta_b;
    hi = theta_a;
  }
  if (hi < lo) hi += kTwoPi;
  return true;
}

double grid_angle(std::size_t j, int m) { return kTwoPi * static_cast<double>(j) / m; }

// First grid index j in [0, m] with phi_j >= x.
std::size_t first_at_or_above(double x, int m) {
  if (x <= 0.0) return 0;
  long j = static_cast<long>(std::ceil(x * m / kTwoPi));
  j = std::clamp(j, 0L, static_cast<long>(m));
  while (j > 0 && grid_angle(j - 1, m) >= x) --j;
  while (j < m && grid_angle(j, m) < x) ++j;
  return static_cast<std::size_t>(j);
}

// Adds +1 to the grid directions inside [lo, hi) (hi may pass 2 pi).
void mark(std::vector<int>& diff, int m, double lo, double hi) {
  if (hi > kTwoPi) {
    mark(diff, m, lo, kTwoPi);
    mark(diff, m, 0.0, hi - kTwoPi);
    return;
  }
  const std::size_t j0 = first_at_or_above(lo, m);
  const std::size_t j1 = (hi >= kTwoPi) ? static_cast<std::size_t>(m) : first_at_or_above(hi, m);
  if (j1 > j0) {
    diff[j0] += 1;
    diff[j1] -= 1;
  }
}

std::vector<double> vertex_angles(const Curve& curve, cplx xi) {
  const auto& v = curve.vertices();
  std::vector<double> th(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) th[i] = angle_0_2pi(v[i] - xi);
  return th;
}

double union_measure(std::vector<std::pair<double, double>>& iv) {
  std::vector<std::pair<double, double>> flat;
  flat.reserve(iv.size() + 4);
  for (auto [lo, hi] : iv) {
    if (hi > kTwoPi) {
      flat.emplace_back(lo, kTwoPi);
      flat.emplace_back(0.0, hi - kTwoPi);
    } else {
      flat.emplace_back(lo, hi);
    }
  }
  std::sort(flat.begin(), flat.end());
  double total = 0.0, cur_lo = 0.0, cur_hi = -1.0;
  for (auto [lo, hi] : flat) {
    if (lo > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return std::min(total, kTwoPi);
}

// Shadows of the segment parts inside R/2 < |t - xi| <= R.
std::vector<std::pair<double, double>> annulus_shadows(const Curve& curve, cplx xi, double R) {
  std::vector<std::pair<double, double>> out;
  const auto& v = curve.vertices();
  Interval parts[2];
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const int n = clip_annulus(v[i], v[i + 1], xi, 0.5 * R, R, parts);
    for (int k = 0; k < n; ++k) {
      const cplx p = lerp(v[i], v[i + 1], parts[k].lo), q = lerp(v[i], v[i + 1], parts[k].hi);
      double lo, hi;
      if (shadow(p, q, xi, angle_0_2pi(p - xi), angle_0_2pi(q - xi), lo, hi)) out.emplace_back(lo, hi);
    }
  }
  return out;
}

// Trapezoid rule in ln(eta) for the integral of f(eta) d eta over the grid.
double log_trapezoid(const std::vector<double>& eta, const std::vector<double>& f) {
  CompensatedSum<double> acc;
  for (std::size_t k = 0; k + 1 < eta.size(); ++k)
    acc.add(0.5 * (f[k] * eta[k] + f[k + 1] * eta[k + 1]) * std::log(eta[k + 1] / eta[k]));
  return acc.value();
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<cplx> vertex_sample(const Curve& curve, std::size_t count, bool resolved_only) {
  const std::size_t n = curve.segment_count();
  std::vector<cplx> out;
  if (count == 0 || count >= n) {
    out.assign(curve.vertices().begin(), curve.vertices().end() - 1);
  } else {
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(curve.vertex(j * n / count));
  }
  if (resolved_only && curve.has_generator() && curve.resolved_scale() > 0.0) {
    const double rs = curve.resolved_scale();
    std::erase_if(out, [&](cplx z) {
      for (cplx a : curve.generator()->anchors)
        if (std::abs(z - a) < rs) return true;
      return false;
    });
  }
  if (curve.has_generator()) {
    for (cplx a : curve.generator()->anchors)
      if (distance_to_curve(curve, a) <= 1e-12 * (1.0 + std::abs(a))) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> vertices_on_piece(const Curve& curve, const std::string& prefix) {
  std::vector<std::size_t> out;
  if (!curve.has_generator()) return out;
  const auto& pieces = curve.generator()->pieces;
  const auto& idx = curve.piece_index();
  for (std::size_t i = 0; i < curve.segment_count(); ++i)
    if (pieces[idx[i]].label.rfind(prefix, 0) == 0) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------

double neighborhood_measure(const Curve& curve, cplx xi, double eps) {
  if (!(eps > 0.0)) throw DomainError("neighborhood radius must be positive");
  CompensatedSum<double> acc;
  const auto& v = curve.vertices();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const Interval in = disk_interval(v[i], v[i + 1], xi, eps);
    if (in.width() > 0.0) acc.add(in.width() * curve.segment_length(i));
  }
  return acc.value();
}

namespace {

// theta_xi(eps_k) for every k, eps increasing.
std::vector<double> theta_profile(const Curve& curve, cplx xi, const std::vector<double>& eps) {
  const std::size_t m = eps.size();
  std::vector<CompensatedSum<double>> full(m + 1), part(m);
  const auto& v = curve.vertices();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const cplx a = v[i], b = v[i + 1];
    const double len = curve.segment_length(i);
    const double dmin = point_segment_distance(xi, a, b);
    const double dmax = std::max(std::abs(a - xi), std::abs(b - xi));
    const std::size_t k_in = std::lower_bound(eps.begin(), eps.end(), dmin) - eps.begin();
    const std::size_t k_full = std::lower_bound(eps.begin(), eps.end(), dmax) - eps.begin();
    full[k_full].add(len);
    for (std::size_t k = k_in; k < k_full; ++k) {
      const Interval in = disk_interval(a, b, xi, eps[k]);
      if (in.width() > 0.0) part[k].add(in.width() * len);
    }
  }
  std::vector<double> out(m);
  CompensatedSum<double> running;
  for (std::size_t k = 0; k < m; ++k) {
    running.add(full[k].value());
    out[k] = running.value() + part[k].value();
  }
  return out;
}

}  // namespace

RegularityReport theta_report(const Curve& curve, const std::vector<double>& eps_in, const std::vector<cplx>& xi,
                              unsigned threads) {
  RegularityReport rep;
  rep.eps = eps_in;
  std::sort(rep.eps.begin(), rep.eps.end());
  for (double e : rep.eps)
    if (!(e > 0.0)) throw DomainError("theta grid values must be positive");
  rep.xi_count = xi.size();
  std::vector<std::vector<double>> rows(xi.size());
  parallel_for(xi.size(), threads, [&](std::size_t j) { rows[j] = theta_profile(curve, xi[j], rep.eps); });
  const std::size_t m = rep.eps.size();
  rep.theta.assign(m, 0.0);
  rep.argmax.assign(m, cplx{});
  for (std::size_t j = 0; j < xi.size(); ++j)
    for (std::size_t k = 0; k < m; ++k)
      if (rows[j][k] > rep.theta[k]) {
        rep.theta[k] = rows[j][k];
        rep.argmax[k] = xi[j];
      }
  rep.ratio.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    rep.ratio[k] = rep.theta[k] / rep.eps[k];
    rep.constant = std::max(rep.constant, rep.ratio[k]);
  }
  return rep;
}

// ---------------------------------------------------------------------------

int ray_crossings(const Curve& curve, cplx xi, double phi) {
  const auto& v = curve.vertices();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const cplx d = std::polar(1.0, phi + attempt * kRayJitter);
    bool degenerate = false;
    int count = 0;
    for (std::size_t i = 0; i < curve.segment_count() && !degenerate; ++i) {
      const cplx pa = v[i] - xi, pb = v[i + 1] - xi;
      const bool za = is_base_point(v[i], xi), zb = is_base_point(v[i + 1], xi);
      if (za && zb) continue;
      const double oa = cross(d, pa), ob = cross(d, pb);
      const bool on_a = !za && std::abs(oa) <= 4e-16 * std::abs(pa) && dot(d, pa) > 0.0;
      const bool on_b = !zb && std::abs(ob) <= 4e-16 * std::abs(pb) && dot(d, pb) > 0.0;
      if (on_a || on_b) {
        degenerate = true;
        break;
      }
      if (za || zb) continue;
      if ((oa > 0.0) == (ob > 0.0) || oa == 0.0 || ob == 0.0) continue;
      const cplx e = pb - pa;
      const double r = cross(pa, e) / cross(d, e);
      if (r > 1e-13 * (std::abs(pa) + std::abs(pb))) ++count;
    }
    if (!degenerate) return count;
  }
  throw NonConvergenceError("ray stays degenerate after jittering");
}

std::vector<int> crossing_profile(const Curve& curve, cplx xi, int directions) {
  if (directions < 1) throw DomainError("direction count must be positive");
  const auto& v = curve.vertices();
  const std::vector<double> th = vertex_angles(curve, xi);
  std::vector<int> diff(directions + 1, 0);
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    double lo, hi;
    if (shadow(v[i], v[i + 1], xi, th[i], th[i + 1], lo, hi)) mark(diff, directions, lo, hi);
  }
  std::vector<int> mu(directions);
  int run = 0;
  for (int j = 0; j < directions; ++j) {
    run += diff[j];
    mu[j] = run;
  }
  return mu;
}

double kral_functional(const Curve& curve, cplx xi, int directions) {
  if (directions < 360) throw DomainError("the Kral functional needs at least 360 directions");
  const std::vector<int> mu = crossing_profile(curve, xi, directions);
  long long total = 0;
  for (int c : mu) total += c;
  return kTwoPi * static_cast<double>(total) / directions;
}

KralReport kral_report(const Curve& curve, const std::vector<cplx>& xi, int directions, unsigned threads) {
  KralReport rep;
  rep.xi = xi;
  rep.directions = directions;
  rep.values.assign(xi.size(), 0.0);
  parallel_for(xi.size(), threads, [&](std::size_t j) { rep.values[j] = kral_functional(curve, xi[j], directions); });
  for (double x : rep.values) rep.sup = std::max(rep.sup, x);
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<AnnulusPiece> annulus_pieces(const Curve& curve, cplx xi, double R) {
  if (!(R > 0.0)) throw DomainError("annulus radius must be positive");
  const auto& v = curve.vertices();
  const std::size_t n = curve.segment_count();
  std::vector<std::vector<cplx>> chains;
  bool open = false;          // last part ended at the end of its segment
  bool first_from_start = false;
  Interval parts[2];
  for (std::size_t i = 0; i < n; ++i) {
    const int m = clip_annulus(v[i], v[i + 1], xi, 0.5 * R, R, parts);
    if (m == 0) {
      open = false;
      continue;
    }
    for (int k = 0; k < m; ++k) {
      const cplx p = lerp(v[i], v[i + 1], parts[k].lo), q = lerp(v[i], v[i + 1], parts[k].hi);
      if (open && parts[k].lo == 0.0) {
        chains.back().push_back(q);
      } else {
        if (chains.empty() && i == 0 && parts[k].lo == 0.0) first_from_start = true;
        chains.push_back({p, q});
      }
      open = (parts[k].hi == 1.0);
    }
  }
  if (chains.size() > 1 && open && first_from_start) {
    std::vector<cplx> merged = std::move(chains.back());
    chains.pop_back();
    merged.insert(merged.end(), chains.front().begin() + 1, chains.front().end());
    chains.front() = std::move(merged);
  }
  std::vector<AnnulusPiece> out(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    AnnulusPiece& piece = out[c];
    piece.points = std::move(chains[c]);
    piece.theta.resize(piece.points.size());
    piece.theta[0] = std::arg(piece.points[0] - xi);
    for (std::size_t j = 1; j < piece.points.size(); ++j)
      piece.theta[j] = piece.theta[j - 1] + angle_increment(piece.points[j - 1], piece.points[j], xi);
  }
  return out;
}

int oscillation_count(const std::vector<AnnulusPiece>& pieces, double psi1, double psi2) {
  if (!(psi1 >= 0.0 && psi1 < psi2 && psi2 < kTwoPi)) throw DomainError("sector needs 0 <= psi1 < psi2 < 2 pi");
  struct Event {
    double level;
    int side;
    long m;
  };
  int count = 0;
  std::vector<Event> ev;
  for (const AnnulusPiece& piece : pieces) {
    bool have_prev = false;
    Event prev{0, 0, 0};
    for (std::size_t j = 0; j + 1 < piece.theta.size(); ++j) {
      const double ta = piece.theta[j], tb = piece.theta[j + 1];
      if (ta == tb) continue;
      const double lo = std::min(ta, tb), hi = std::max(ta, tb);
      ev.clear();
      for (int side = 0; side < 2; ++side) {
        const double psi = side == 0 ? psi1 : psi2;
        const long m0 = static_cast<long>(std::floor((lo - psi) / kTwoPi));
        const long m1 = static_cast<long>(std::floor((hi - psi) / kTwoPi)) + 1;
        for (long m = m0; m <= m1; ++m) {
          const double L = psi + kTwoPi * m;
          if ((ta < L) != (tb < L)) ev.push_back({L, side, m});
        }
      }
      if (tb > ta)
        std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.level < y.level; });
      else
        std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.level > y.level; });
      for (const Event& e : ev) {
        if (have_prev && prev.m == e.m && prev.side != e.side) ++count;
        prev = e;
        have_prev = true;
      }
    }
  }
  return count;
}

int oscillation_count(const Curve& curve, cplx xi, double R, double psi1, double psi2) {
  return oscillation_count(annulus_pieces(curve, xi, R), psi1, psi2);
}

std::vector<std::pair<double, double>> sector_pairs(const SectorResolution& res) {
  std::vector<std::pair<double, double>> out;
  for (int j = 1; j <= res.levels; ++j) {
    const double w = kTwoPi / std::exp2(j);
    const double step = w / std::max(1, res.offsets);
    for (int o = 0;; ++o) {
      const double psi1 = o * step;
      if (!(psi1 + w < kTwoPi)) break;
      out.emplace_back(psi1, psi1 + w);
    }
  }
  return out;
}

int k_gamma(const std::vector<AnnulusPiece>& pieces, const SectorResolution& res) {
  int best = 1;
  if (pieces.empty()) return best;
  for (auto [a, b] : sector_pairs(res)) best = std::max(best, oscillation_count(pieces, a, b));
  return best;
}

int k_gamma(const Curve& curve, cplx xi, double R, const SectorResolution& res) {
  return k_gamma(annulus_pieces(curve, xi, R), res);
}

double phi_gamma(const Curve& curve, cplx xi, double R) {
  if (!(R > 0.0)) throw DomainError("annulus radius must be positive");
  auto iv = annulus_shadows(curve, xi, R);
  return union_measure(iv);
}

double phi_gamma_grid(const Curve& curve, cplx xi, double R, int directions) {
  if (!(R > 0.0)) throw DomainError("annulus radius must be positive");
  std::vector<int> diff(directions + 1, 0);
  for (auto [lo, hi] : annulus_shadows(curve, xi, R)) mark(diff, directions, lo, hi);
  int run = 0, hit = 0;
  for (int j = 0; j < directions; ++j) {
    run += diff[j];
    if (run > 0) ++hit;
  }
  return kTwoPi * hit / directions;
}

namespace {

std::vector<double> hat_radii(double R, int hat_points) {
  const int h = std::max(2, hat_points);
  std::vector<double> r(h);
  for (int i = 0; i < h; ++i) r[i] = R * std::exp2(-static_cast<double>(i) / (h - 1));
  return r;
}

struct HatValues {
  int k = 1;
  double phi = 0.0;
  int k_hat = 1;
  double phi_hat = 0.0;
};

HatValues hats(const Curve& curve, cplx xi, double R, const SectorResolution& res, int hat_points) {
  HatValues hv;
  bool first = true;
  for (double r : hat_radii(R, hat_points)) {
    const int k = k_gamma(annulus_pieces(curve, xi, r), res);
    const double phi = phi_gamma(curve, xi, r);
    if (first) {
      hv.k = k;
      hv.phi = phi;
      first = false;
    }
    hv.k_hat = std::max(hv.k_hat, k);
    hv.phi_hat = std::max(hv.phi_hat, phi);
  }
  return hv;
}

}  // namespace

OscillationProfile oscillation_profile(const Curve& curve, cplx xi, const std::vector<double>& R,
                                       const SectorResolution& res, int hat_points) {
  OscillationProfile p;
  p.xi = xi;
  p.R = R;
  p.resolution = res;
  p.hat_points = hat_points;
  for (double r : R) {
    const HatValues hv = hats(curve, xi, r, res, hat_points);
    p.k.push_back(hv.k);
    p.phi.push_back(hv.phi);
    p.k_hat.push_back(hv.k_hat);
    p.phi_hat.push_back(hv.phi_hat);
  }
  return p;
}

// ---------------------------------------------------------------------------

double ModulusTable::at(double x) const {
  const auto it = std::upper_bound(eta.begin(), eta.end(), x);
  if (it == eta.begin()) return 0.0;
  return omega[static_cast<std::size_t>(it - eta.begin()) - 1];
}

ModulusTable modulus_of_continuity(const std::vector<cplx>& points, const std::vector<double>& values,
                                   std::vector<double> eta, bool angular, unsigned threads, std::string label) {
  if (points.size() != values.size()) throw DomainError("modulus sample size mismatch");
  std::sort(eta.begin(), eta.end());
  eta.erase(std::unique(eta.begin(), eta.end()), eta.end());
  if (eta.empty() || !(eta.front() > 0.0)) throw DomainError("modulus grid must be nonempty and positive");
  const std::size_t n = points.size(), m = eta.size();
  const unsigned workers = std::max(1u, resolve_threads(threads));
  std::vector<std::vector<double>> bins(workers, std::vector<double>(m, 0.0));
  const double top2 = eta.back() * eta.back();
  parallel_for(workers, workers, [&](std::size_t w) {
    auto& bin = bins[w];
    for (std::size_t i = w; i < n; i += workers) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d2 = std::norm(points[i] - points[j]);
        if (d2 > top2) continue;
        double diff = values[i] - values[j];
        if (angular) diff = wrap_to_pi(diff);
        diff = std::abs(diff);
        const std::size_t k = std::lower_bound(eta.begin(), eta.end(), std::sqrt(d2)) - eta.begin();
        if (k < m && diff > bin[k]) bin[k] = diff;
      }
    }
  });
  ModulusTable t;
  t.label = std::move(label);
  t.eta = std::move(eta);
  t.samples = n;
  t.omega.assign(m, 0.0);
  double run = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (const auto& bin : bins) run = std::max(run, bin[k]);
    t.omega[k] = run;
  }
  return t;
}

namespace {

std::vector<std::size_t> strided(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> idx;
  if (max_points == 0 || max_points >= n) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  } else {
    for (std::size_t j = 0; j < max_points; ++j) idx.push_back(j * n / max_points);
  }
  return idx;
}

}  // namespace

ModulusTable density_modulus(const Curve& curve, const Density& g, std::vector<double> eta, std::size_t max_points,
                             unsigned threads) {
  std::vector<cplx> pts;
  std::vector<double> vals;
  for (std::size_t i : strided(curve.segment_count(), max_points)) {
    pts.push_back(curve.vertex(i));
    vals.push_back(g(curve.vertex(i), curve.arc_coords()[i]));
  }
  return modulus_of_continuity(pts, vals, std::move(eta), false, threads, "density " + g.rule_id());
}

ModulusTable tangent_modulus(const Curve& curve, std::vector<double> eta, std::size_t max_points, unsigned threads) {
  std::vector<cplx> pts;
  std::vector<double> vals;
  const auto& v = curve.vertices();
  for (std::size_t i : strided(curve.segment_count(), max_points)) {
    pts.push_back(0.5 * (v[i] + v[i + 1]));
    vals.push_back(std::arg(v[i + 1] - v[i]));
  }
  return modulus_of_continuity(pts, vals, std::move(eta), true, threads, "tangent angle");
}

double omega_characteristic(const ModulusTable& table, double a, double b) {
  if (!(a > 0.0)) throw DomainError("Omega needs a > 0");
  if (a > b) throw DomainError("Omega needs a <= b");
  double best = std::max(table.at(a) / a, table.at(b) / b);
  const auto lo = std::lower_bound(table.eta.begin(), table.eta.end(), a);
  for (auto it = lo; it != table.eta.end() && *it <= b; ++it) {
    const std::size_t k = static_cast<std::size_t>(it - table.eta.begin());
    best = std::max(best, table.omega[k] / table.eta[k]);
  }
  return best;
}

double omega_monotonicity_defect(const ModulusTable& table) {
  const std::size_t m = table.eta.size();
  std::vector<double> ratio(m);
  for (std::size_t k = 0; k < m; ++k) ratio[k] = table.omega[k] / table.eta[k];
  // Om[i][j] for i <= j, built row by row from the right.
  std::vector<std::vector<double>> om(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    double run = 0.0;
    for (std::size_t j = i; j < m; ++j) {
      run = std::max(run, ratio[j]);
      om[i][j] = run;
    }
  }
  auto excess = [](double smaller, double larger) {
    if (smaller <= larger) return 0.0;
    return (smaller - larger) / std::max(std::abs(larger), 1e-300);
  };
  double defect = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      if (i + 1 <= j) {
        defect = std::max(defect, excess(om[i + 1][j], om[i][j]));
        defect = std::max(defect, excess(table.eta[i] * om[i][j], table.eta[i + 1] * om[i + 1][j]));
      }
      if (j + 1 < m) defect = std::max(defect, excess(om[i][j], om[i][j + 1]));
    }
  return defect;
}

std::string to_string(DiniKind k) {
  switch (k) {
    case DiniKind::Plain:
      return "plain";
    case DiniKind::LogWeighted:
      return "log-weighted";
    case DiniKind::Tangent:
      return "tangent";
    default:
      return "arg";
  }
}

DiniResult dini_integral(const ModulusTable& table, DiniKind kind, double upper, double resolved_scale,
                         const ConvergencePolicy& policy) {
  DiniResult res;
  res.kind = kind;
  res.upper = upper;
  if (table.eta.empty() || !(upper > table.eta.front())) throw DomainError("Dini sweep outside the table range");
  auto weight = [&](double e) { return kind == DiniKind::LogWeighted ? std::log(2.0 / e) : 1.0; };
  // Nodes (ln eta, omega * weight), from the top down.
  std::vector<double> ln_eta, h;
  ln_eta.push_back(std::log(upper));
  h.push_back(table.at(upper) * weight(upper));
  for (std::size_t k = table.eta.size(); k-- > 0;) {
    if (table.eta[k] >= upper) continue;
    ln_eta.push_back(std::log(table.eta[k]));
    h.push_back(table.omega[k] * weight(table.eta[k]));
  }
  std::vector<double> cum(ln_eta.size(), 0.0);
  for (std::size_t k = 1; k < ln_eta.size(); ++k)
    cum[k] = cum[k - 1] + 0.5 * (h[k] + h[k - 1]) * (ln_eta[k - 1] - ln_eta[k]);
  std::vector<double> deltas, values;
  std::size_t node = 0;
  for (int k = 0;; ++k) {
    const double d = std::ldexp(upper, -k);
    const double ld = std::log(d);
    if (ld < ln_eta.back()) break;
    while (node + 1 < ln_eta.size() && ln_eta[node + 1] >= ld) ++node;
    double val = cum[node];
    if (node + 1 < ln_eta.size() && ld < ln_eta[node]) {
      const double f = (ln_eta[node] - ld) / (ln_eta[node] - ln_eta[node + 1]);
      const double h_at = h[node] + f * (h[node + 1] - h[node]);
      val += 0.5 * (h[node] + h_at) * (ln_eta[node] - ld);
    }
    deltas.push_back(d);
    values.push_back(val);
    res.trace.emplace_back(d, val);
  }
  res.value = values.empty() ? 0.0 : values.back();
  res.status = classify_trace(deltas, values, resolved_scale, policy);
  return res;
}

// ---------------------------------------------------------------------------

std::string to_string(Theorem3Variant v) { return v == Theorem3Variant::Theorem3 ? "theorem3" : "corollary1"; }

namespace {

struct IntegralResult {
  double value = 0.0;
  TraceStatus status = TraceStatus::Inconclusive;
};

IntegralResult condition_integral(const Curve& curve, const ModulusTable& omega, cplx xi, double lower, double upper,
                                  const Theorem3Settings& s, int ppo) {
  IntegralResult out;
  if (!(upper > lower)) return out;
  const std::vector<double> eta = log_grid(lower, upper, ppo);
  std::vector<double> f(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const HatValues hv = hats(curve, xi, eta[k], s.sectors, s.hat_points);
    if (s.variant == Theorem3Variant::Theorem3)
      f[k] = hv.phi_hat * omega_characteristic(omega, eta[k] / hv.k_hat, eta[k]);
    else
      f[k] = hv.phi_hat * hv.k_hat * omega.at(eta[k]) / eta[k];
  }
  out.value = log_trapezoid(eta, f);
  // Partial integrals from the top down, sampled once per octave.
  std::vector<double> deltas, values;
  CompensatedSum<double> acc;
  deltas.push_back(eta.back());
  values.push_back(0.0);
  for (std::size_t k = eta.size() - 1; k-- > 0;) {
    acc.add(0.5 * (f[k] * eta[k] + f[k + 1] * eta[k + 1]) * std::log(eta[k + 1] / eta[k]));
    if ((eta.size() - 1 - k) % static_cast<std::size_t>(ppo) == 0) {
      deltas.push_back(eta[k]);
      values.push_back(acc.value());
    }
  }
  out.status = classify_trace(deltas, values, 0.0);
  return out;
}

}  // namespace

Theorem3Report theorem3_report(const Curve& curve, const ModulusTable& omega, const Partition& partition,
                               const std::vector<cplx>& xi, const Theorem3Settings& s) {
  if (!partition.in_first) throw ConfigError("partition has no gamma^1 membership rule");
  if (!(partition.R0 > 0.0 && partition.R0 <= curve.diameter() * (1.0 + 1e-12)))
    throw ConfigError("partition R0 must lie in (0, diameter]");
  Theorem3Report rep;
  rep.settings = s;
  rep.rows.resize(xi.size());
  double lower1 = s.lower_limit;
  if (!(lower1 > 0.0)) lower1 = curve.resolved_scale() > 0.0 ? 0.25 * curve.resolved_scale() : 1e-6 * partition.R0;
  parallel_for(xi.size(), s.threads, [&](std::size_t j) {
    Theorem3Row& row = rep.rows[j];
    row.xi = xi[j];
    row.part = partition.in_first(xi[j]) ? 1 : 2;
    double lower = lower1;
    if (row.part == 2) {
      if (!partition.radius) throw ConfigError("partition has no r(xi) rule for gamma^2");
      row.r = std::min(partition.radius(xi[j]), partition.R0);
      if (!(row.r > 0.0)) throw ConfigError("r(xi) must be positive");
      lower = row.r;
      const VariationResult vr = total_arg_variation(curve, xi[j], {}, {}, row.r);
      row.variation = vr.value;
      row.variation_status = vr.status;
    }
    const IntegralResult base = condition_integral(curve, omega, xi[j], lower, partition.R0, s, s.points_per_octave);
    const IntegralResult fine =
        condition_integral(curve, omega, xi[j], lower, partition.R0, s, 2 * s.points_per_octave);
    row.integral = base.value;
    row.integral_refined = fine.value;
    row.integral_status = fine.status;
    row.total = row.variation + row.integral_refined;
    // On gamma^2 the integral runs over [r, R0] and is finite once computed.
    row.finite = std::isfinite(row.total) && (row.part == 1 ? fine.status != TraceStatus::Divergent
                                                            : row.variation_status != TraceStatus::Divergent);
    row.stable = std::abs(base.value - fine.value) <= s.stability_tol * std::abs(fine.value) + 1e-12;
  });
  rep.pass = true;
  for (const Theorem3Row& row : rep.rows) {
    if (row.part == 1) {
      rep.sup_first = std::max(rep.sup_first, row.integral_refined);
    } else {
      rep.sup_second = std::max(rep.sup_second, row.total);
      rep.sup_second_integral = std::max(rep.sup_second_integral, row.integral_refined);
      rep.sup_variation = std::max(rep.sup_variation, row.variation);
    }
    rep.pass = rep.pass && row.finite && row.stable;
  }
  return rep;
}

LemmaCheck lemma_inequality_check(const Curve& curve, const Density& g, const ModulusTable& omega, cplx xi, double R,
                                  LemmaKind which, double eps, const SectorResolution& sectors, int hat_points) {
  LemmaCheck c;
  if (which == LemmaKind::Lemma2) {
    c.lhs = std::abs(stieltjes_arg_integral(curve, g, xi, 0.5 * R, R));
    c.k = k_gamma(annulus_pieces(curve, xi, R), sectors);
    c.phi = phi_gamma(curve, xi, R);
    c.omega_char = omega_characteristic(omega, R / c.k, R);
    c.rhs = 6.0 * R * c.phi * c.omega_char;
  } else {
    if (!(eps > R)) throw DomainError("Lemma 3 needs delta < eps");
    c.lhs = std::abs(stieltjes_arg_integral(curve, g, xi, R, eps));
    Theorem3Settings s;
    s.variant = Theorem3Variant::Theorem3;
    s.sectors = sectors;
    s.hat_points = hat_points;
    c.rhs = condition_integral(curve, omega, xi, R, 2.0 * eps, s, 8).value + omega.at(eps);
  }
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : (c.lhs > 0.0 ? kInf : 0.0);
  return c;
}

// ---------------------------------------------------------------------------

AhlforsCheck ahlfors_check(const Curve& curve, const std::vector<double>& eps, std::size_t xi_count,
                           double stability_tol, unsigned threads) {
  AhlforsCheck c;
  c.report = theta_report(curve, eps, vertex_sample(curve, xi_count), threads);
  c.constant = c.report.constant;
  c.constant_refined = theta_report(curve, eps, vertex_sample(curve, 2 * xi_count), threads).constant;
  c.pass = std::isfinite(c.constant_refined) &&
           std::abs(c.constant_refined - c.constant) <= stability_tol * c.constant_refined;
  return c;
}

KralCheck kral_check(const Curve& curve, const std::vector<cplx>& xi, int directions, double stability_tol,
                     unsigned threads) {
  KralCheck c;
  c.statuses.assign(xi.size(), TraceStatus::Inconclusive);
  c.variation.assign(xi.size(), 0.0);
  c.functional.assign(xi.size(), 0.0);
  c.functional_refined.assign(xi.size(), 0.0);
  parallel_for(xi.size(), threads, [&](std::size_t j) {
    const VariationResult vr = total_arg_variation(curve, xi[j]);
    c.statuses[j] = vr.status;
    c.variation[j] = vr.value;
    c.functional[j] = kral_functional(curve, xi[j], directions);
    c.functional_refined[j] = kral_functional(curve, xi[j], 2 * directions);
  });
  c.pass = true;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    c.sup_variation = std::max(c.sup_variation, c.variation[j]);
    c.sup_functional = std::max(c.sup_functional, c.functional[j]);
    c.sup_functional_refined = std::max(c.sup_functional_refined, c.functional_refined[j]);
    c.pass = c.pass && c.statuses[j] == TraceStatus::Converged;
  }
  c.pass = c.pass && std::abs(c.sup_functional_refined - c.sup_functional) <= stability_tol * c.sup_functional_refined;
  return c;
}

}  // namespace layerpot
