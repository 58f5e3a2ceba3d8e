#include "layerpot/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "layerpot/curve.hpp"

namespace layerpot {

Density::Density(std::string rule_id, nlohmann::json params, Rule rule)
    : rule_id_(std::move(rule_id)), params_(std::move(params)), rule_(std::move(rule)) {}

Density Density::constant(double c) {
  return Density("const", {{"value", c}}, [c](cplx, double) { return c; });
}

Density Density::real_part() {
  return Density("re", nlohmann::json::object(), [](cplx t, double) { return t.real(); });
}

Density Density::imag_part() {
  return Density("im", nlohmann::json::object(), [](cplx t, double) { return t.imag(); });
}

Density Density::holder(double alpha, double x0) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("holder exponent must lie in (0, 1]");
  return Density("holder", {{"alpha", alpha}, {"x0", x0}},
                 [alpha, x0](cplx t, double) { return std::pow(std::abs(t.real() - x0), alpha); });
}

Density Density::log_example() {
  return Density("ex4-log", nlohmann::json::object(), [](cplx t, double) {
    const double r = std::abs(t);
    return r == 0.0 ? 0.0 : -1.0 / (std::log(r) - 1.0);
  });
}

Density Density::table(std::vector<double> s, std::vector<double> g, double period) {
  if (s.size() != g.size() || s.size() < 2) throw ConfigError("density table needs matching s and g columns");
  if (!std::is_sorted(s.begin(), s.end())) throw ConfigError("density table s column must be increasing");
  if (!(period > 0.0)) throw ConfigError("density table period must be positive");
  auto ss = std::make_shared<std::vector<double>>(std::move(s));
  auto gg = std::make_shared<std::vector<double>>(std::move(g));
  return Density("table", {{"rows", ss->size()}, {"period", period}}, [ss, gg, period](cplx, double x) {
    const auto& S = *ss;
    const auto& G = *gg;
    x = std::fmod(x - S.front(), period);
    if (x < 0) x += period;
    x += S.front();
    auto it = std::upper_bound(S.begin(), S.end(), x);
    if (it == S.end()) {
      // Wrap segment from the last row back to the first row one period later.
      const double span = S.front() + period - S.back();
      const double f = span > 0 ? (x - S.back()) / span : 0.0;
      return G.back() + f * (G.front() - G.back());
    }
    if (it == S.begin()) return G.front();
    const std::size_t k = static_cast<std::size_t>(it - S.begin());
    const double f = (x - S[k - 1]) / (S[k] - S[k - 1]);
    return G[k - 1] + f * (G[k] - G[k - 1]);
  });
}

Density Density::combination(double a, const Density& f, double b, const Density& h) {
  Rule rf = f.rule_, rh = h.rule_;
  return Density("combination", {{"a", a}, {"f", density_to_json(f)}, {"b", b}, {"h", density_to_json(h)}},
                 [a, b, rf, rh](cplx t, double s) { return a * rf(t, s) + b * rh(t, s); });
}

Density Density::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty density spec");
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("bad numeric field in density spec '" + spec + "'");
    }
  };
  const std::string& name = parts[0];
  if (name == "const") return constant(parts.size() > 1 ? num(1) : 1.0);
  if (name == "re") return real_part();
  if (name == "im") return imag_part();
  if (name == "ex4-log") return log_example();
  if (name == "holder") return holder(parts.size() > 1 ? num(1) : 0.5, parts.size() > 2 ? num(2) : 0.0);
  throw ConfigError("unknown density '" + spec + "'");
}

std::vector<double> Density::at_vertices(const Curve& curve) const {
  std::vector<double> out(curve.vertices().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rule_(curve.vertex(i), curve.arc_coords()[i]);
  out.back() = out.front();
  return out;
}

nlohmann::json density_to_json(const Density& g) { return {{"rule_id", g.rule_id()}, {"params", g.params()}}; }

Density density_from_json(const nlohmann::json& j) {
  try {
    const std::string id = j.at("rule_id").get<std::string>();
    const auto& p = j.value("params", nlohmann::json::object());
    if (id == "const") return Density::constant(p.value("value", 1.0));
    if (id == "holder") return Density::holder(p.value("alpha", 0.5), p.value("x0", 0.0));
    if (id == "table") throw ConfigError("table densities are loaded from CSV");
    return Density::parse(id);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed density JSON: ") + e.what());
  }
}

Density read_density_csv(const std::string& path, double period) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read density file " + path);
  std::vector<double> s, g;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double a, b;
    if (!(is >> a >> b)) continue;
    s.push_back(a);
    g.push_back(b);
  }
  return Density::table(std::move(s), std::move(g), period);
}

}  // namespace layerpot
