#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "layerpot/common.hpp"

namespace layerpot {

class Curve;

// Real boundary function g. Closed-form rules see the point t (and its arc
// coordinate s); tables interpolate linearly in s with period = curve length.
class Density {
 public:
  using Rule = std::function<double(cplx t, double s)>;

  Density() = default;
  Density(std::string rule_id, nlohmann::json params, Rule rule);

  static Density constant(double c);
  static Density real_part();
  static Density imag_part();
  // |Re t - x0|^alpha
  static Density holder(double alpha, double x0 = 0.0);
  // -1 / (ln|t| - 1), and 0 at t = 0.
  static Density log_example();
  static Density table(std::vector<double> s, std::vector<double> g, double period);
  static Density combination(double a, const Density& f, double b, const Density& h);

  // Parses "const:1", "re", "im", "holder:0.5[:x0]", "ex4-log".
  static Density parse(const std::string& spec);

  double operator()(cplx t, double s) const { return rule_(t, s); }
  const std::string& rule_id() const { return rule_id_; }
  const nlohmann::json& params() const { return params_; }

  // Values at every vertex (including the closing duplicate).
  std::vector<double> at_vertices(const Curve& curve) const;

 private:
  std::string rule_id_;
  nlohmann::json params_ = nlohmann::json::object();
  Rule rule_;
};

nlohmann::json density_to_json(const Density& g);
Density density_from_json(const nlohmann::json& j);
Density read_density_csv(const std::string& path, double period);

}  // namespace layerpot
