#pragma once

#include <string>
#include <vector>

#include "layerpot/curve.hpp"
#include "layerpot/density.hpp"

namespace layerpot {

struct ZooSpec {
  std::string name = "circle";
  int depth = 6;  // truncation depth N for the infinitely pieced examples
  ResolutionPolicy policy{};
  double radius = 1.0;      // circle
  double a = 2.0, b = 1.0;  // ellipse semi-axes
  double amplitude = 0.1;   // lyapunov blob
  double alpha = 0.5;
  int harmonics = 3;
};

Curve make_circle(double radius, const ResolutionPolicy& policy = {});
Curve make_ellipse(double a, double b, const ResolutionPolicy& policy = {});
Curve make_lyapunov_blob(double amplitude, double alpha, int harmonics = 3, const ResolutionPolicy& policy = {});
Curve make_example1(int depth, const ResolutionPolicy& policy = {});
Curve make_example2(const ResolutionPolicy& policy = {});
Curve make_example3(int depth, const ResolutionPolicy& policy = {});
Curve make_example4(int depth, const ResolutionPolicy& policy = {});
Density make_density_example4();

Curve make_zoo(const ZooSpec& spec);
std::vector<std::string> zoo_names();
std::string canonical_zoo_name(const std::string& name);  // "ex1" -> "example1", "lyapunov" -> "lyapunov_blob"

// Ellipse x^2/a^2 + (y-b)^2/b^2 = 1 through 0 (horizontal tangent there) and
// through `point` with counterclockwise tangent parallel to `direction`.
// sigma is the ellipse angle of `point`, measured from the bottom vertex 0.
struct EllipseGlue {
  double a = 0, b = 0, sigma = 0;
};
EllipseGlue glue_ellipse(cplx point, cplx direction);

// Spiral of the second example: t(r) = r exp(-i / ln r).
cplx example2_spiral(double r);
cplx example2_spiral_derivative(double r);
struct Example2Geometry {
  double r0 = 0;       // smallest positive root of Re t'(r)
  double r_min = 0;    // truncation radius of the spiral
  EllipseGlue ellipse;
};
Example2Geometry example2_geometry();

// Arc of the third example: t(r) = r exp(-i (r / ln r) cos(pi / r)).
cplx example3_arc(double r);
cplx example3_arc_derivative(double r);
EllipseGlue example3_ellipse();

}  // namespace layerpot
