#include "layerpot/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "layerpot/kernels.hpp"

namespace layerpot {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double orient(cplx a, cplx b, cplx c) { return cross(b - a, c - a); }

struct SampleSink {
  std::vector<cplx>& pts;
  std::vector<std::uint32_t>& piece;
  std::vector<double>& param;
  void push(cplx z, std::uint32_t k, double p) {
    if (!pts.empty() && pts.back() == z) return;
    pts.push_back(z);
    piece.push_back(k);
    param.push_back(p);
  }
};

class PieceSampler {
 public:
  PieceSampler(const Piece& piece, std::uint32_t index, const std::vector<cplx>& anchors,
               const ResolutionPolicy& policy, SampleSink& sink)
      : piece_(piece), index_(index), anchors_(anchors), policy_(policy), sink_(sink) {}

  void run() {
    const double span = piece_.p1 - piece_.p0;
    std::size_t m = 1;
    if (std::isfinite(piece_.max_step) && piece_.max_step > 0.0)
      m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(span) / piece_.max_step)));
    cplx za = piece_.eval(piece_.p0);
    for (std::size_t k = 0; k < m; ++k) {
      const double pa = piece_.p0 + span * double(k) / double(m);
      const double pb = (k + 1 == m) ? piece_.p1 : piece_.p0 + span * double(k + 1) / double(m);
      const cplx zb = piece_.eval(pb);
      split(pa, za, pb, zb, 0);
      za = zb;
    }
  }

 private:
  double anchor_distance(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const cplx& a : anchors_) d = std::min(d, std::abs(z - a));
    return d;
  }

  bool acceptable(cplx za, cplx zm, cplx zb) const {
    const double chord = std::abs(zb - za);
    double limit = policy_.h;
    if (policy_.grading > 0.0 && !anchors_.empty()) {
      const double d = std::min({anchor_distance(za), anchor_distance(zm), anchor_distance(zb)});
      limit = std::min(limit, std::max({policy_.grading * d, policy_.floor, piece_.grading_floor}));
    }
    if (chord > limit) return false;
    const cplx d1 = zm - za;
    const cplx d2 = zb - zm;
    if (std::abs(d1) == 0.0 || std::abs(d2) == 0.0) return true;
    const double turn = std::abs(std::atan2(cross(d1, d2), (d1 * std::conj(d2)).real()));
    return turn <= policy_.max_turn;
  }

  void split(double pa, cplx za, double pb, cplx zb, int depth) {
    const double pm = 0.5 * (pa + pb);
    const cplx zm = piece_.eval(pm);
    if (depth >= policy_.max_depth || pm == pa || pm == pb || acceptable(za, zm, zb)) {
      sink_.push(za, index_, pa);
      return;
    }
    split(pa, za, pm, zm, depth + 1);
    split(pm, zm, pb, zb, depth + 1);
  }

  const Piece& piece_;
  std::uint32_t index_;
  const std::vector<cplx>& anchors_;
  const ResolutionPolicy& policy_;
  SampleSink& sink_;
};

struct BvhNode {
  BBox box;
  std::size_t lo = 0, hi = 0;
  int left = -1, right = -1;
};

class IntersectionFinder {
 public:
  explicit IntersectionFinder(const std::vector<cplx>& v) : v_(v), n_(v.size() - 1) {
    nodes_.reserve(2 * (n_ / kLeaf + 1));
    build(0, n_);
  }

  std::optional<std::pair<std::size_t, std::size_t>> run() {
    self(0);
    return hit_;
  }

 private:
  static constexpr std::size_t kLeaf = 8;

  int build(std::size_t lo, std::size_t hi) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    BvhNode node;
    node.lo = lo;
    node.hi = hi;
    if (hi - lo <= kLeaf) {
      node.box = {v_[lo].real(), v_[lo].real(), v_[lo].imag(), v_[lo].imag()};
      for (std::size_t i = lo; i <= hi; ++i) grow(node.box, v_[i]);
    } else {
      const std::size_t mid = lo + (hi - lo) / 2;
      node.left = build(lo, mid);
      node.right = build(mid, hi);
      const BBox& a = nodes_[node.left].box;
      const BBox& b = nodes_[node.right].box;
      node.box = {std::min(a.xmin, b.xmin), std::max(a.xmax, b.xmax), std::min(a.ymin, b.ymin),
                  std::max(a.ymax, b.ymax)};
    }
    nodes_[id] = node;
    return id;
  }

  static void grow(BBox& b, cplx z) {
    b.xmin = std::min(b.xmin, z.real());
    b.xmax = std::max(b.xmax, z.real());
    b.ymin = std::min(b.ymin, z.imag());
    b.ymax = std::max(b.ymax, z.imag());
  }

  static double extent(const BBox& b) { return std::hypot(b.xmax - b.xmin, b.ymax - b.ymin); }

  // Padding never exceeds the segment contact tolerance of any pair inside.
  static bool overlap(const BBox& a, const BBox& b) {
    const double t = std::min(1e-12, 2e-9 * std::min(extent(a), extent(b)));
    return a.xmin <= b.xmax + t && b.xmin <= a.xmax + t && a.ymin <= b.ymax + t && b.ymin <= a.ymax + t;
  }

  bool adjacent(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return j == i + 1 || (i == 0 && j == n_ - 1) || i == j;
  }

  bool segments_touch(std::size_t i, std::size_t j) const {
    const cplx a = v_[i], b = v_[i + 1], c = v_[j], d = v_[j + 1];
    const double d1 = orient(a, b, c), d2 = orient(a, b, d);
    const double d3 = orient(c, d, a), d4 = orient(c, d, b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    const double tol = std::min(1e-12, 1e-9 * std::min(std::abs(b - a), std::abs(d - c)));
    const double dist = std::min({point_segment_distance(c, a, b), point_segment_distance(d, a, b),
                                  point_segment_distance(a, c, d), point_segment_distance(b, c, d)});
    return dist <= tol;
  }

  void leaf_pairs(const BvhNode& A, const BvhNode& B) {
    for (std::size_t i = A.lo; i < A.hi && !hit_; ++i)
      for (std::size_t j = std::max(B.lo, &A == &B ? i + 1 : B.lo); j < B.hi && !hit_; ++j)
        if (!adjacent(i, j) && segments_touch(i, j)) hit_ = std::make_pair(std::min(i, j), std::max(i, j));
  }

  void self(int id) {
    if (hit_) return;
    const BvhNode& n = nodes_[id];
    if (n.left < 0) {
      leaf_pairs(n, n);
      return;
    }
    self(n.left);
    self(n.right);
    pair(n.left, n.right);
  }

  void pair(int a, int b) {
    if (hit_) return;
    const BvhNode& A = nodes_[a];
    const BvhNode& B = nodes_[b];
    if (!overlap(A.box, B.box)) return;
    if (A.left < 0 && B.left < 0) {
      leaf_pairs(A, B);
      return;
    }
    if (B.left < 0 || (A.left >= 0 && A.hi - A.lo >= B.hi - B.lo)) {
      pair(A.left, b);
      pair(A.right, b);
    } else {
      pair(a, B.left);
      pair(a, B.right);
    }
  }

  const std::vector<cplx>& v_;
  std::size_t n_;
  std::vector<BvhNode> nodes_;
  std::optional<std::pair<std::size_t, std::size_t>> hit_;
};

std::string describe_segment(const Curve& c, std::size_t i) {
  std::ostringstream os;
  os << std::setprecision(12) << "segment " << i << " (s in [" << c.arc_coords()[i] << ", "
     << c.arc_coords()[i + 1] << "]";
  if (c.has_generator() && i < c.piece_index().size()) {
    const auto k = c.piece_index()[i];
    os << ", piece '" << c.generator()->pieces[k].label << "' p=" << c.piece_param()[i];
  }
  os << ")";
  return os.str();
}

std::vector<double> segment_directions(const Curve& c, std::size_t upto) {
  std::vector<double> u(upto + 1);
  const auto& v = c.vertices();
  double prev = std::arg(v[1] - v[0]);
  u[0] = prev;
  for (std::size_t k = 1; k <= upto; ++k) {
    const double d = std::arg(v[k + 1] - v[k]);
    u[k] = u[k - 1] + wrap_to_pi(d - prev);
    prev = d;
  }
  return u;
}

// Forward tangent from the analytic piece at segment i, parameter fraction u.
std::optional<double> analytic_direction(const Curve& c, std::size_t i, double u) {
  if (!c.has_generator()) return std::nullopt;
  const auto& pi = c.piece_index();
  const auto& pp = c.piece_param();
  const Piece& piece = c.generator()->pieces[pi[i]];
  const double p_end = (i + 1 < c.segment_count() && pi[i + 1] == pi[i]) ? pp[i + 1] : piece.p1;
  const double p = pp[i] + u * (p_end - pp[i]);
  const double dp = std::max(std::abs(p_end - pp[i]) * 1e-4, 1e-13 * (1.0 + std::abs(p)));
  const double sgn = (piece.p1 >= piece.p0) ? 1.0 : -1.0;
  double lo = p - dp, hi = p + dp;
  const double pmin = std::min(piece.p0, piece.p1), pmax = std::max(piece.p0, piece.p1);
  lo = std::max(lo, pmin);
  hi = std::min(hi, pmax);
  const cplx d = (piece.eval(hi) - piece.eval(lo)) * sgn;
  if (std::abs(d) == 0.0) return std::nullopt;
  return std::arg(d);
}

}  // namespace

void Curve::finalize(bool check_simple) {
  const std::size_t m = vertices_.size();
  if (m < 4) throw ConstructionError("curve needs at least three distinct vertices");
  bbox_ = {vertices_[0].real(), vertices_[0].real(), vertices_[0].imag(), vertices_[0].imag()};
  for (const cplx& z : vertices_) {
    bbox_.xmin = std::min(bbox_.xmin, z.real());
    bbox_.xmax = std::max(bbox_.xmax, z.real());
    bbox_.ymin = std::min(bbox_.ymin, z.imag());
    bbox_.ymax = std::max(bbox_.ymax, z.imag());
  }
  arc_.assign(m, 0.0);
  CompensatedSum<double> len;
  CompensatedSum<double> area;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double l = std::abs(vertices_[i + 1] - vertices_[i]);
    if (!(l > 0.0)) throw ConstructionError("zero-length segment at index " + std::to_string(i));
    len.add(l);
    arc_[i + 1] = len.value();
    area.add(0.5 * cross(vertices_[i], vertices_[i + 1]));
  }
  area_ = area.value();
  diameter_ = polygon_diameter(vertices_);
  if (check_simple) {
    if (auto hit = find_self_intersection(vertices_))
      throw SelfIntersectionError("self-intersection between " + describe_segment(*this, hit->first) + " and " +
                                  describe_segment(*this, hit->second));
  }
  if (!(area_ > 0.0)) throw ConstructionError("curve is not positively oriented (signed area <= 0)");
}

Curve Curve::from_vertices(std::vector<cplx> v, std::string generator_id, nlohmann::json params, bool check_simple) {
  std::vector<cplx> clean;
  clean.reserve(v.size());
  for (const cplx& z : v)
    if (clean.empty() || clean.back() != z) clean.push_back(z);
  if (clean.size() < 4) throw ConstructionError("polyline needs at least three distinct vertices");
  const double scale = polygon_diameter(clean);
  if (std::abs(clean.back() - clean.front()) > 1e-9 * scale)
    throw ClosureError("polyline is not closed: last vertex differs from first by " +
                       std::to_string(std::abs(clean.back() - clean.front())));
  clean.back() = clean.front();
  Curve c;
  c.vertices_ = std::move(clean);
  c.generator_id_ = std::move(generator_id);
  c.params_ = std::move(params);
  c.finalize(check_simple);
  return c;
}

Curve build_polyline(const std::shared_ptr<const Generator>& gen, const ResolutionPolicy& policy) {
  if (!gen || gen->pieces.empty()) throw ConstructionError("generator has no pieces");
  if (!(policy.h > 0.0)) throw ConfigError("resolution h must be positive");
  Curve c;
  SampleSink sink{c.vertices_, c.piece_, c.param_};
  double scale = 0.0;
  for (std::size_t k = 0; k < gen->pieces.size(); ++k) {
    const Piece& p = gen->pieces[k];
    const Piece& next = gen->pieces[(k + 1) % gen->pieces.size()];
    const cplx end = p.eval(p.p1);
    const cplx start_next = next.eval(next.p0);
    scale = std::max({scale, std::abs(end), std::abs(start_next)});
    if (k + 1 < gen->pieces.size()) {
      const double tol = 1e-12 * (1.0 + std::abs(end));
      if (std::abs(end - start_next) > tol)
        throw ConstructionError("pieces '" + p.label + "' and '" + next.label + "' fail to chain (gap " +
                                std::to_string(std::abs(end - start_next)) + ")");
    }
    PieceSampler(p, static_cast<std::uint32_t>(k), gen->anchors, policy, sink).run();
  }
  const Piece& last = gen->pieces.back();
  const cplx end = last.eval(last.p1);
  const cplx start = c.vertices_.front();
  if (std::abs(end - start) > 1e-9 * std::max(1e-300, polygon_diameter(c.vertices_)))
    throw ClosureError("generator '" + gen->id + "' does not close: gap " + std::to_string(std::abs(end - start)));
  c.vertices_.push_back(start);
  c.piece_.push_back(0);
  c.param_.push_back(gen->pieces.front().p0);
  c.generator_ = gen;
  c.generator_id_ = gen->id;
  c.params_ = gen->params;
  c.finalize(policy.check_simple);
  return c;
}

CurveLocation Curve::locate_arc(double s) const {
  const double L = length();
  if (L > 0.0) {
    s = std::fmod(s, L);
    if (s < 0) s += L;
  }
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  std::size_t i = (it == arc_.begin()) ? 0 : static_cast<std::size_t>(it - arc_.begin()) - 1;
  if (i >= segment_count()) i = segment_count() - 1;
  const double len = segment_length(i);
  const double u = std::clamp((s - arc_[i]) / len, 0.0, 1.0);
  CurveLocation loc;
  loc.segment = i;
  loc.u = u;
  loc.s = s;
  loc.point = (u == 0.0) ? vertices_[i] : (u == 1.0 ? vertices_[i + 1] : vertices_[i] + u * (vertices_[i + 1] - vertices_[i]));
  return loc;
}

CurveLocation Curve::nearest(cplx z) const {
  CurveLocation best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segment_count(); ++i) {
    const cplx a = vertices_[i], b = vertices_[i + 1];
    const cplx d = b - a;
    double u = ((z - a) * std::conj(d)).real() / std::norm(d);
    u = std::clamp(u, 0.0, 1.0);
    const cplx p = (u == 0.0) ? a : (u == 1.0 ? b : a + u * d);
    const double dist = std::abs(z - p);
    if (dist < best.distance) {
      best.distance = dist;
      best.segment = i;
      best.u = u;
      best.point = p;
      best.s = arc_[i] + u * segment_length(i);
    }
  }
  if (best.u == 1.0 && best.segment + 1 < segment_count()) {
    best.segment += 1;
    best.u = 0.0;
  }
  return best;
}

Curve refine_near(const Curve& curve, cplx xi, double radius, int factor) {
  if (factor <= 1) return curve;
  const auto& v = curve.vertices();
  const std::size_t n = curve.segment_count();
  const bool analytic = curve.has_generator() && curve.piece_index().size() == v.size();
  Curve out;
  out.vertices_.reserve(v.size());
  if (analytic) {
    out.piece_.reserve(v.size());
    out.param_.reserve(v.size());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = v[i], b = v[i + 1];
    out.vertices_.push_back(a);
    if (analytic) {
      out.piece_.push_back(curve.piece_[i]);
      out.param_.push_back(curve.param_[i]);
    }
    if (point_segment_distance(xi, a, b) > radius) continue;
    bool same_piece = false;
    double p0 = 0, p1 = 0;
    const Piece* piece = nullptr;
    if (analytic) {
      piece = &curve.generator()->pieces[curve.piece_[i]];
      p0 = curve.param_[i];
      if (i + 1 < n && curve.piece_[i + 1] == curve.piece_[i]) {
        p1 = curve.param_[i + 1];
        same_piece = true;
      } else {
        p1 = piece->p1;
        same_piece = true;
      }
    }
    for (int k = 1; k < factor; ++k) {
      const double f = double(k) / factor;
      if (same_piece) {
        const double p = p0 + f * (p1 - p0);
        out.vertices_.push_back(piece->eval(p));
        out.piece_.push_back(curve.piece_[i]);
        out.param_.push_back(p);
      } else {
        out.vertices_.push_back(a + f * (b - a));
      }
    }
  }
  out.vertices_.push_back(v.back());
  if (analytic) {
    out.piece_.push_back(curve.piece_.back());
    out.param_.push_back(curve.param_.back());
  }
  out.generator_ = curve.generator_;
  out.generator_id_ = curve.generator_id_;
  out.params_ = curve.params_;
  out.resolved_scale_ = curve.resolved_scale_;
  out.finalize(true);
  return out;
}

NeighborhoodSlice neighborhood(const Curve& curve, cplx xi, double eps) {
  if (!(eps > 0.0)) throw DomainError("neighborhood radius must be positive");
  NeighborhoodSlice out;
  out.center = xi;
  out.radius = eps;
  const auto& v = curve.vertices();
  const auto& s = curve.arc_coords();
  const double L = curve.length();
  const double join_tol = 1e-14 * L;
  CompensatedSum<double> measure;
  for (std::size_t i = 0; i < curve.segment_count(); ++i) {
    const Interval in = disk_interval(v[i], v[i + 1], xi, eps);
    if (in.width() <= 0.0) continue;
    const double len = curve.segment_length(i);
    const double a = s[i] + in.lo * len;
    const double b = (in.hi == 1.0) ? s[i + 1] : s[i] + in.hi * len;
    measure.add(b - a);
    if (!out.subarcs.empty() && std::abs(out.subarcs.back().second - a) <= join_tol)
      out.subarcs.back().second = b;
    else
      out.subarcs.emplace_back(a, b);
  }
  if (out.subarcs.size() > 1 && out.subarcs.front().first <= join_tol &&
      std::abs(out.subarcs.back().second - L) <= join_tol) {
    const double tail = out.subarcs.front().second;
    out.subarcs.erase(out.subarcs.begin());
    out.subarcs.back().second = L + tail;
  }
  out.measure = measure.value();
  return out;
}

TangentInfo tangent_angle(const Curve& curve, double s) {
  const CurveLocation loc = curve.locate_arc(s);
  std::size_t i = loc.segment;
  double u = loc.u;
  const std::size_t n = curve.segment_count();
  const double vtx_tol = 1e-12;
  bool at_vertex = false;
  if (u <= vtx_tol) {
    at_vertex = true;
  } else if (u >= 1.0 - vtx_tol) {
    at_vertex = true;
    i = (i + 1) % n;
  }
  const std::vector<double> base = segment_directions(curve, i);
  const double Ui = base[i];
  TangentInfo out;
  if (!at_vertex) {
    const auto a = analytic_direction(curve, i, u);
    out.angle = a ? Ui + wrap_to_pi(*a - Ui) : Ui;
    out.before = out.after = out.angle;
    return out;
  }
  const std::size_t prev = (i + n - 1) % n;
  const auto& pidx = curve.piece_index();
  const bool same_piece = curve.has_generator() && pidx[prev] == pidx[i] && i != 0;
  auto after = analytic_direction(curve, i, 0.0);
  auto before = analytic_direction(curve, prev, 1.0);
  double a_after = after ? Ui + wrap_to_pi(*after - Ui) : Ui;
  const double prev_dir = (i == 0) ? Ui - wrap_to_pi(Ui - std::arg(curve.vertex(n) - curve.vertex(n - 1))) : base[i - 1];
  double a_before = before ? prev_dir + wrap_to_pi(*before - prev_dir) : prev_dir;
  a_before = a_after + wrap_to_pi(a_before - a_after);
  if (same_piece) {
    out.angle = out.before = out.after = a_after;
    return out;
  }
  const double angle_tol = curve.has_generator() ? 1e-6 : 1e-9;
  out.before = a_before;
  out.after = a_after;
  out.angle = a_after;
  out.corner = std::abs(a_after - a_before) > angle_tol;
  return out;
}

double diameter(const Curve& curve) { return curve.diameter(); }

double polygon_diameter(const std::vector<cplx>& pts) {
  if (pts.size() < 2) return 0.0;
  std::vector<cplx> p(pts);
  std::sort(p.begin(), p.end(), [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() == 1) return 0.0;
  std::vector<cplx> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  const std::size_t h = hull.size();
  if (h <= 2) return std::abs(p.back() - p.front());
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < h; ++i) {
    const cplx a = hull[i], b = hull[(i + 1) % h];
    while (std::abs(orient(a, b, hull[(j + 1) % h])) > std::abs(orient(a, b, hull[j]))) j = (j + 1) % h;
    best = std::max({best, std::abs(hull[j] - a), std::abs(hull[j] - b)});
  }
  return best;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const std::vector<cplx>& closed) {
  if (closed.size() < 4) return std::nullopt;
  return IntersectionFinder(closed).run();
}

int winding_number(const Curve& curve, cplx z) {
  const auto& v = curve.vertices();
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < curve.segment_count(); ++i) total.add(angle_increment(v[i], v[i + 1], z));
  return static_cast<int>(std::lround(total.value() / kTwoPi));
}

double distance_to_curve(const Curve& curve, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  const auto& v = curve.vertices();
  for (std::size_t i = 0; i < curve.segment_count(); ++i) d = std::min(d, point_segment_distance(z, v[i], v[i + 1]));
  return d;
}

nlohmann::json curve_to_json(const Curve& curve) {
  nlohmann::json j;
  j["generator_id"] = curve.generator_id();
  j["params"] = curve.params();
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (const cplx& z : curve.vertices()) vs.push_back({z.real(), z.imag()});
  j["arc_coords"] = curve.arc_coords();
  j["length"] = curve.length();
  j["diameter"] = curve.diameter();
  return j;
}

Curve curve_from_json(const nlohmann::json& j) {
  try {
    std::vector<cplx> v;
    for (const auto& p : j.at("vertices")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return Curve::from_vertices(std::move(v), j.value("generator_id", std::string("polyline")),
                                j.value("params", nlohmann::json::object()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed curve JSON: ") + e.what());
  }
}

void write_vertices_csv(const Curve& curve, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << std::setprecision(17) << "x,y,s\n";
  for (std::size_t i = 0; i < curve.vertices().size(); ++i)
    f << curve.vertex(i).real() << ',' << curve.vertex(i).imag() << ',' << curve.arc_coords()[i] << '\n';
}

Curve read_polyline_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read polyline file " + path);
  std::vector<cplx> v;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double x, y;
    if (!(is >> x >> y)) continue;  // header or malformed row
    v.emplace_back(x, y);
  }
  if (v.size() < 4) throw ConstructionError("polyline file " + path + " has fewer than four vertices");
  // Clockwise input is accepted and reversed.
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) area += cross(v[i], v[i + 1]);
  if (area < 0) std::reverse(v.begin(), v.end());
  return Curve::from_vertices(std::move(v), "polyline", {{"source", path}});
}

}  // namespace layerpot
