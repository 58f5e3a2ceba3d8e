#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "layerpot/common.hpp"

namespace layerpot {

// One smooth parametric piece, traversed from p0 to p1 (p1 may be < p0).
struct Piece {
  std::function<cplx(double)> eval;
  double p0 = 0.0;
  double p1 = 1.0;
  // Largest parameter increment per polyline segment before any adaptive split.
  double max_step = std::numeric_limits<double>::infinity();
  std::string label;
  // Smallest chord the anchor grading may ask for on this piece; the larger
  // of this and the policy floor applies.
  double grading_floor = 0.0;
};

struct Generator {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Piece> pieces;
  // Points toward which the mesh is graded (chord <= grading * distance).
  std::vector<cplx> anchors;
};

struct ResolutionPolicy {
  double h = 1e-3;
  double max_turn = 0.1;
  double grading = 1.0 / 16.0;
  double floor = 0.0;
  int max_depth = 400;
  bool check_simple = true;
};

struct CurveLocation {
  std::size_t segment = 0;
  double u = 0.0;  // position inside the segment, [0, 1]
  double s = 0.0;  // arc coordinate
  cplx point{};
  double distance = 0.0;  // distance from the query point, for nearest()
};

struct TangentInfo {
  double angle = 0.0;  // unwrapped forward tangent angle
  bool corner = false;
  double before = 0.0;  // one-sided angles; equal to `angle` off corners
  double after = 0.0;
};

struct NeighborhoodSlice {
  cplx center{};
  double radius = 0.0;
  std::vector<std::pair<double, double>> subarcs;  // [s_begin, s_end], s_end may exceed length when wrapping
  double measure = 0.0;
};

struct BBox {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

// Closed, positively oriented, simple polyline. vertices().back() == vertices().front().
class Curve {
 public:
  Curve() = default;

  // Validates closure, orientation and simplicity. The input must repeat the
  // first vertex at the end (within the closure tolerance).
  static Curve from_vertices(std::vector<cplx> closed_vertices, std::string generator_id,
                             nlohmann::json params = nlohmann::json::object(), bool check_simple = true);

  std::size_t segment_count() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }
  const std::vector<cplx>& vertices() const { return vertices_; }
  const std::vector<double>& arc_coords() const { return arc_; }
  cplx vertex(std::size_t i) const { return vertices_[i]; }
  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  double diameter() const { return diameter_; }
  double signed_area() const { return area_; }
  const BBox& bbox() const { return bbox_; }
  const std::string& generator_id() const { return generator_id_; }
  const nlohmann::json& params() const { return params_; }
  nlohmann::json& params() { return params_; }

  // Smallest scale at which the polyline still follows the intended geometry
  // (truncation depth of the infinite constructions); 0 for plain curves.
  double resolved_scale() const { return resolved_scale_; }
  void set_resolved_scale(double v) { resolved_scale_ = v; }

  bool has_generator() const { return generator_ != nullptr; }
  const Generator* generator() const { return generator_.get(); }
  const std::vector<std::uint32_t>& piece_index() const { return piece_; }
  const std::vector<double>& piece_param() const { return param_; }

  double segment_length(std::size_t i) const { return arc_[i + 1] - arc_[i]; }
  CurveLocation locate_arc(double s) const;
  cplx point_at(double s) const { return locate_arc(s).point; }
  CurveLocation nearest(cplx z) const;

 private:
  friend Curve build_polyline(const std::shared_ptr<const Generator>& gen, const ResolutionPolicy& policy);
  friend Curve refine_near(const Curve& curve, cplx xi, double radius, int factor);
  void finalize(bool check_simple);

  std::vector<cplx> vertices_;
  std::vector<double> arc_;
  std::vector<std::uint32_t> piece_;
  std::vector<double> param_;
  std::shared_ptr<const Generator> generator_;
  std::string generator_id_;
  nlohmann::json params_ = nlohmann::json::object();
  double diameter_ = 0.0;
  double area_ = 0.0;
  double resolved_scale_ = 0.0;
  BBox bbox_;
};

Curve build_polyline(const std::shared_ptr<const Generator>& gen, const ResolutionPolicy& policy);
Curve refine_near(const Curve& curve, cplx xi, double radius, int factor);
NeighborhoodSlice neighborhood(const Curve& curve, cplx xi, double eps);
TangentInfo tangent_angle(const Curve& curve, double s);
double diameter(const Curve& curve);
double polygon_diameter(const std::vector<cplx>& pts);

// Index pair of two non-adjacent segments closer than the tolerance, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(const std::vector<cplx>& closed);

// Winding number of the closed polyline around z (z must be off the curve).
int winding_number(const Curve& curve, cplx z);
double distance_to_curve(const Curve& curve, cplx z);

nlohmann::json curve_to_json(const Curve& curve);
Curve curve_from_json(const nlohmann::json& j);
void write_vertices_csv(const Curve& curve, const std::string& path);
Curve read_polyline_csv(const std::string& path);

}  // namespace layerpot
