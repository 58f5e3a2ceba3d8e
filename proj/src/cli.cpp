#include "layerpot/cli.hpp"

#include <openssl/evp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "layerpot/arg_tracker.hpp"
#include "layerpot/diagnostics.hpp"
#include "layerpot/integrals.hpp"
#include "layerpot/zoo.hpp"

#ifndef LAYERPOT_VERSION
#define LAYERPOT_VERSION "0.0.0"
#endif

namespace layerpot::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::get("layerpot");
    if (!l) l = spdlog::stderr_color_mt("layerpot");
    l->set_pattern("[%l] %v");
    return l;
  }();
  return log;
}

// Files produced by one command. Everything is deleted again when the command fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    created_dir_ = !fs::exists(dir_, ec);
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory " + dir_.string());
    const fs::path probe = dir_ / ".layerpot_probe";
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory is not writable: " + dir_.string());
    f.close();
    fs::remove(probe, ec);
  }

  std::string add(const std::string& name) {
    if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
    return (dir_ / name).string();
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream f(add(name));
    if (!f) throw ConfigError("cannot write " + name);
    f << j.dump(2) << '\n';
  }

  json inventory() const {
    json files = json::array();
    for (const auto& n : names_) {
      const fs::path p = dir_ / n;
      files.push_back({{"name", n}, {"sha256", sha256_file(p.string())}, {"bytes", fs::file_size(p)}});
    }
    return files;
  }

  void discard() {
    std::error_code ec;
    for (const auto& n : names_) fs::remove(dir_ / n, ec);
    fs::remove(dir_ / "manifest.json", ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
  bool created_dir_ = false;
};

struct Context {
  json config;
  unsigned threads = 1;
  json flags = json::object();
  bool nonconverged = false;
};

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value '") + key + "': " + e.what());
  }
}

std::vector<double> get_doubles(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get<std::vector<double>>(j, key);
}

std::vector<double> dyadic(int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Curve build_curve(const json& c) {
  const auto polyline = get<std::string>(c, "polyline");
  if (!polyline.empty()) return read_polyline_csv(polyline);
  ZooSpec spec;
  spec.name = get<std::string>(c, "zoo");
  spec.depth = get<int>(c, "depth");
  spec.policy.h = get<double>(c, "h");
  spec.radius = get<double>(c, "radius");
  spec.a = get<double>(c, "a");
  spec.b = get<double>(c, "b");
  spec.amplitude = get<double>(c, "amplitude");
  spec.alpha = get<double>(c, "alpha");
  spec.harmonics = get<int>(c, "harmonics");
  if (spec.depth < 1) throw ConfigError("depth must be at least 1");
  if (!(spec.policy.h > 0.0)) throw ConfigError("mesh size h must be positive");
  return make_zoo(spec);
}

std::string density_spec(const Context& ctx, const Curve& curve) {
  auto spec = get<std::string>(ctx.config, "density");
  if (spec.empty()) spec = curve.generator_id() == "example4" ? "ex4-log" : "re";
  return spec;
}

Density build_density(const Context& ctx, const Curve& curve) {
  const std::string spec = density_spec(ctx, curve);
  if (spec.rfind("table:", 0) == 0) return read_density_csv(spec.substr(6), curve.length());
  return Density::parse(spec);
}

json curve_summary(const Curve& curve) {
  return {{"generator", curve.generator_id()},
          {"params", curve.params()},
          {"segments", curve.segment_count()},
          {"length", curve.length()},
          {"diameter", curve.diameter()},
          {"area", curve.signed_area()},
          {"resolved_scale", curve.resolved_scale()}};
}

ConvergencePolicy policy_of(const Context& ctx) {
  ConvergencePolicy p;
  const json& t = ctx.config.at("tolerances");
  p.tol = get<double>(t, "trace");
  p.window = get<int>(t, "window");
  if (!(p.tol > 0.0) || p.window < 1) throw ConfigError("trace tolerance and window must be positive");
  return p;
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << header << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << '\n';
  }
}

// ---------------------------------------------------------------------------

void cmd_curve(Context& ctx, Outputs& out) {
  const Curve curve = build_curve(ctx.config.at("curve"));
  json j = curve_to_json(curve);
  j["summary"] = curve_summary(curve);
  out.write_json("curve.json", j);
  write_vertices_csv(curve, out.add("vertices.csv"));
  ctx.flags["simple"] = true;
  ctx.flags["closed"] = true;
  logger()->info("{}: {} segments, length {:.6g}, diameter {:.6g}", curve.generator_id(), curve.segment_count(),
                 curve.length(), curve.diameter());
}

Partition partition_for(const Curve& curve) {
  Partition p;
  p.R0 = 0.5;
  if (curve.generator_id() == "example4") {
    p.in_first = [](cplx z) { return z == cplx(0.0, 0.0); };
    p.radius = [](cplx z) { return std::min(2.0 * std::abs(z), 0.5); };
    p.description = "gamma1 = {0}, r(xi) = min(2|xi|, 1/2), R0 = 1/2";
  } else {
    p.in_first = [](cplx) { return false; };
    p.radius = [](cplx) { return 0.5; };
    p.description = "gamma1 empty, r(xi) = R0 = 1/2";
  }
  return p;
}

void dini_rows(std::vector<std::vector<std::string>>& rows, json& report, const DiniResult& d, const std::string& what) {
  for (const auto& [lo, val] : d.trace) rows.push_back({what, to_string(d.kind), fmt17(lo), fmt17(val)});
  report.push_back(
      {{"table", what}, {"kind", to_string(d.kind)}, {"value", d.value}, {"status", to_string(d.status)}, {"upper", d.upper}});
}

void cmd_diagnose(Context& ctx, Outputs& out) {
  const Curve curve = build_curve(ctx.config.at("curve"));
  const Density g = build_density(ctx, curve);
  const json& grids = ctx.config.at("grids");
  const json& tol = ctx.config.at("tolerances");
  const double stability = get<double>(tol, "stability");
  const ConvergencePolicy policy = policy_of(ctx);
  std::vector<double> eps = get_doubles(grids, "eps");
  if (eps.empty()) eps = dyadic(1, 10);
  std::vector<double> R = get_doubles(grids, "R");
  if (R.empty()) R = dyadic(1, 10);
  const auto xi_count = get<std::size_t>(grids, "xi_count");
  const int directions = get<int>(grids, "directions");
  if (xi_count == 0) throw ConfigError("xi_count must be positive");
  json report;
  report["curve"] = curve_summary(curve);
  report["density"] = density_spec(ctx, curve);

  logger()->info("ahlfors regularity");
  const AhlforsCheck ah = ahlfors_check(curve, eps, get<std::size_t>(grids, "ahlfors_xi_count"), stability, ctx.threads);
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < ah.report.eps.size(); ++i)
      rows.push_back({fmt17(ah.report.eps[i]), fmt17(ah.report.theta[i]), fmt17(ah.report.ratio[i]),
                      fmt17(ah.report.argmax[i].real()), fmt17(ah.report.argmax[i].imag())});
    write_csv(out.add("regularity.csv"), "eps,theta,ratio,argmax_x,argmax_y", rows);
  }
  report["ahlfors"] = {{"constant", ah.constant}, {"constant_refined", ah.constant_refined}, {"pass", ah.pass}};
  ctx.flags["ahlfors"] = ah.pass;

  logger()->info("kral functional and arg variation");
  const std::vector<cplx> xi = vertex_sample(curve, xi_count, true);
  const KralCheck kr = kral_check(curve, xi, directions, stability, ctx.threads);
  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < xi.size(); ++j)
      rows.push_back({fmt17(xi[j].real()), fmt17(xi[j].imag()), fmt17(kr.variation[j]), to_string(kr.statuses[j]),
                      fmt17(kr.functional[j]), fmt17(kr.functional_refined[j])});
    write_csv(out.add("kral.csv"), "xi_x,xi_y,variation,variation_status,functional,functional_refined", rows);
  }
  const auto divergent = std::count(kr.statuses.begin(), kr.statuses.end(), TraceStatus::Divergent);
  report["kral"] = {{"sup_variation", kr.sup_variation},
                    {"sup_functional", kr.sup_functional},
                    {"sup_functional_refined", kr.sup_functional_refined},
                    {"divergent_points", divergent},
                    {"pass", kr.pass}};
  ctx.flags["kral"] = kr.pass;

  if (curve.generator_id() == "example3" && get<std::string>(ctx.config.at("curve"), "polyline").empty()) {
    logger()->info("kral depth sweep at 0");
    json sweep = {{"depths", json::array()}, {"functional", json::array()}};
    std::vector<std::vector<std::string>> rows;
    double prev = -1.0;
    bool increasing = true;
    for (int d : get<std::vector<int>>(grids, "depths")) {
      json c = ctx.config.at("curve");
      c["depth"] = d;
      const Curve cd = build_curve(c);
      const double f = kral_functional(cd, 0.0, directions);
      increasing = increasing && f > prev;
      prev = f;
      sweep["depths"].push_back(d);
      sweep["functional"].push_back(f);
      rows.push_back({std::to_string(d), fmt17(f)});
    }
    sweep["strictly_increasing"] = increasing;
    write_csv(out.add("kral_depth.csv"), "depth,functional", rows);
    report["kral_depth_sweep"] = sweep;
    ctx.flags["kral_depth_increasing"] = increasing;
  }

  logger()->info("oscillation profile");
  {
    const cplx x0 = curve.generator() && !curve.generator()->anchors.empty() ? curve.generator()->anchors.front()
                                                                              : curve.vertex(0);
    const OscillationProfile op = oscillation_profile(curve, x0, R);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < op.R.size(); ++i)
      rows.push_back({fmt17(op.R[i]), std::to_string(op.k[i]), fmt17(op.phi[i]), std::to_string(op.k_hat[i]),
                      fmt17(op.phi_hat[i])});
    write_csv(out.add("oscillation.csv"), "R,k,phi,k_hat,phi_hat", rows);
    report["oscillation"] = {{"xi", {op.xi.real(), op.xi.imag()}}};
  }

  logger()->info("moduli of continuity");
  const double top = std::max(1.0, curve.diameter());
  const std::vector<double> eta =
      log_grid(get<double>(grids, "eta_min"), top, get<int>(grids, "eta_points_per_octave"));
  const ModulusTable tangent = tangent_modulus(curve, eta, 0, ctx.threads);
  const ModulusTable dens = density_modulus(curve, g, eta, 0, ctx.threads);
  auto write_table = [&](const ModulusTable& t, const std::string& name) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < t.eta.size(); ++i) rows.push_back({fmt17(t.eta[i]), fmt17(t.omega[i])});
    write_csv(out.add(name), "eta,omega", rows);
  };
  write_table(tangent, "modulus_tangent.csv");
  write_table(dens, "modulus_density.csv");
  report["omega_monotonicity_defect"] = {{"tangent", omega_monotonicity_defect(tangent)},
                                         {"density", omega_monotonicity_defect(dens)}};

  std::vector<std::vector<std::string>> dini_csv;
  json dini = json::array();
  const double rs = curve.resolved_scale();
  dini_rows(dini_csv, dini, dini_integral(dens, DiniKind::Plain, 1.0, rs, policy), "density");
  dini_rows(dini_csv, dini, dini_integral(dens, DiniKind::LogWeighted, 1.0, rs, policy), "density");
  dini_rows(dini_csv, dini, dini_integral(tangent, DiniKind::Tangent, 1.0, rs, policy), "tangent");
  if (curve.generator_id() == "example2" && curve.has_generator()) {
    std::vector<cplx> pts{0.0};
    std::vector<double> vals{0.0};
    for (std::size_t i : vertices_on_piece(curve, "spiral")) {
      pts.push_back(curve.vertex(i));
      vals.push_back(std::arg(curve.vertex(i)));
    }
    const ModulusTable argmod = modulus_of_continuity(pts, vals, eta, true, ctx.threads, "arg");
    write_table(argmod, "modulus_arg.csv");
    dini_rows(dini_csv, dini, dini_integral(argmod, DiniKind::Arg, 1.0, rs, policy), "arg");
  }
  write_csv(out.add("dini.csv"), "table,kind,lower_limit,partial_integral", dini_csv);
  report["dini"] = dini;
  for (const auto& d : dini)
    if (d["status"] == "inconclusive") ctx.nonconverged = true;

  logger()->info("partition conditions");
  Theorem3Settings ts;
  ts.threads = ctx.threads;
  ts.stability_tol = stability;
  const Partition part = partition_for(curve);
  const Theorem3Report t3 = theorem3_report(curve, dens, part, xi, ts);
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : t3.rows)
      rows.push_back({fmt17(r.xi.real()), fmt17(r.xi.imag()), std::to_string(r.part), fmt17(r.r), fmt17(r.variation),
                      to_string(r.variation_status), fmt17(r.integral), fmt17(r.integral_refined),
                      to_string(r.integral_status), fmt17(r.total), r.finite ? "1" : "0", r.stable ? "1" : "0"});
    write_csv(out.add("theorem3.csv"),
              "xi_x,xi_y,part,r,variation,variation_status,integral,integral_refined,integral_status,total,finite,stable",
              rows);
    for (const auto& r : t3.rows)
      if (!r.stable) ctx.nonconverged = true;
  }
  report["theorem3"] = {{"variant", to_string(ts.variant)},
                        {"partition", part.description},
                        {"sup_first", t3.sup_first},
                        {"sup_second", t3.sup_second},
                        {"sup_second_integral", t3.sup_second_integral},
                        {"sup_variation", t3.sup_variation},
                        {"pass", t3.pass}};
  ctx.flags["theorem3"] = t3.pass;
  out.write_json("report.json", report);
}

FieldGrid field_grid(const Context& ctx, const Curve& curve) {
  const json& grids = ctx.config.at("grids");
  FieldGrid fg;
  const auto dims = get<std::string>(grids, "field");
  const auto x = dims.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(dims);
    std::size_t used = 0;
    fg.nx = std::stoi(dims.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(dims);
    fg.ny = std::stoi(dims.substr(x + 1), &used);
    if (used != dims.size() - x - 1) throw std::invalid_argument(dims);
  } catch (const std::exception&) {
    throw ConfigError("field grid must look like 64x64, got '" + dims + "'");
  }
  if (fg.nx < 1 || fg.ny < 1) throw ConfigError("field grid sizes must be positive");
  const std::vector<double> box = get_doubles(grids, "field_box");
  if (box.size() == 4) {
    fg.xmin = box[0], fg.xmax = box[1], fg.ymin = box[2], fg.ymax = box[3];
  } else if (box.empty()) {
    const BBox& b = curve.bbox();
    const double pad = 0.25 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
    fg.xmin = b.xmin - pad, fg.xmax = b.xmax + pad, fg.ymin = b.ymin - pad, fg.ymax = b.ymax + pad;
  } else {
    throw ConfigError("field_box needs [xmin, xmax, ymin, ymax]");
  }
  return fg;
}

void cmd_potential(Context& ctx, Outputs& out) {
  const Curve curve = build_curve(ctx.config.at("curve"));
  const Density g = build_density(ctx, curve);
  const json& grids = ctx.config.at("grids");
  QuadratureOptions q;
  q.tol = get<double>(ctx.config.at("tolerances"), "quadrature");
  logger()->info("potential field");
  const auto field = potential_field(curve, g, field_grid(ctx, curve), ctx.threads, q);
  write_field_csv(out.add("field.csv"), field);
  std::size_t inside = 0, on_curve = 0;
  for (const auto& p : field) inside += p.winding != 0, on_curve += p.on_curve;
  json report = {{"curve", curve_summary(curve)},
                 {"density", density_spec(ctx, curve)},
                 {"field_points", field.size()},
                 {"inside", inside},
                 {"on_curve", on_curve}};
  if (get<bool>(ctx.config, "boundary_sweep")) {
    logger()->info("boundary sweep");
    ApproachOptions ao;
    ao.h0 = get<double>(grids, "h0");
    ao.levels = get<int>(grids, "h_levels");
    if (ao.levels < 2 || ao.levels > 60) throw ConfigError("h_levels must lie in [2, 60]");
    const auto xi = vertex_sample(curve, get<std::size_t>(grids, "boundary_points"), true);
    const auto rows = boundary_sweep(curve, g, xi, ao, ctx.threads);
    write_boundary_csv(out.add("boundary.csv"), rows);
    std::size_t full = 0, stable = 0, converged = 0;
    double jump_err = 0.0;
    for (const auto& r : rows) {
      full += r.pv_full, stable += r.stabilized, converged += r.converged;
      if (r.pv_full) jump_err = std::max(jump_err, std::abs(r.jump - r.g_xi));
      if (!r.stabilized) ctx.nonconverged = true;
    }
    report["boundary"] = {{"points", rows.size()},
                          {"pv_full", full},
                          {"stabilized", stable},
                          {"converged", converged},
                          {"max_jump_error_where_pv_full", jump_err}};
    ctx.flags["boundary_stabilized"] = stable == rows.size();
  }
  out.write_json("report.json", report);
}

void cmd_criterion(Context& ctx, Outputs& out) {
  const Curve curve = build_curve(ctx.config.at("curve"));
  const Density g = build_density(ctx, curve);
  const json& grids = ctx.config.at("grids");
  std::vector<double> eps = get_doubles(grids, "eps");
  if (eps.empty()) eps = dyadic(2, 7);
  for (double e : eps)
    if (!(e > 0.0)) throw ConfigError("eps values must be positive");
  CriterionOptions co;
  co.delta_levels = get<int>(grids, "delta_levels");
  co.threads = ctx.threads;
  if (co.delta_levels < 1) throw ConfigError("delta_levels must be positive");
  const auto xi = vertex_sample(curve, get<std::size_t>(grids, "xi_count"), true);
  const auto rows = criterion_sweep(curve, g, eps, xi, co);
  write_criterion_csv(out.add("criterion.csv"), rows);
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].value < rows[i - 1].value;
  ctx.flags["criterion_decreasing"] = decreasing;
  out.write_json("report.json", {{"curve", curve_summary(curve)},
                                 {"density", density_spec(ctx, curve)},
                                 {"xi_points", xi.size()},
                                 {"strictly_decreasing", decreasing},
                                 {"last", rows.empty() ? 0.0 : rows.back().value}});
}

void cmd_lemma_check(Context& ctx, Outputs& out) {
  const Curve curve = build_curve(ctx.config.at("curve"));
  const Density g = build_density(ctx, curve);
  const json& grids = ctx.config.at("grids");
  const int cases = get<int>(grids, "lemma_cases");
  if (cases < 1) throw ConfigError("lemma_cases must be positive");
  const std::vector<double> eta = log_grid(get<double>(grids, "eta_min"), std::max(1.0, curve.diameter()),
                                           get<int>(grids, "eta_points_per_octave"));
  const ModulusTable omega = density_modulus(curve, g, eta, 0, ctx.threads);
  std::mt19937_64 rng(get<std::uint64_t>(ctx.config, "seed"));
  struct Case {
    cplx xi;
    double R;
  };
  std::vector<Case> picks(cases);
  for (auto& c : picks) {
    c.xi = curve.vertex(rng() % curve.segment_count());
    c.R = std::ldexp(1.0, -static_cast<int>(1 + rng() % 12));
  }
  std::vector<LemmaCheck> l2(cases), l3(cases);
  parallel_for(picks.size(), ctx.threads, [&](std::size_t i) {
    l2[i] = lemma_inequality_check(curve, g, omega, picks[i].xi, picks[i].R, LemmaKind::Lemma2);
    const double e = std::min(0.5, 8.0 * picks[i].R);
    l3[i] = lemma_inequality_check(curve, g, omega, picks[i].xi, picks[i].R / 2.0, LemmaKind::Lemma3, e);
  });
  std::vector<std::vector<std::string>> rows;
  double worst2 = 0.0, fit3 = 0.0;
  for (int i = 0; i < cases; ++i) {
    rows.push_back({fmt17(picks[i].xi.real()), fmt17(picks[i].xi.imag()), fmt17(picks[i].R), fmt17(l2[i].lhs),
                    fmt17(l2[i].rhs), fmt17(l2[i].ratio), std::to_string(l2[i].k), fmt17(l2[i].phi),
                    fmt17(l3[i].lhs), fmt17(l3[i].rhs), fmt17(l3[i].ratio)});
    worst2 = std::max(worst2, l2[i].ratio);
    fit3 = std::max(fit3, l3[i].ratio);
  }
  write_csv(out.add("lemma.csv"), "xi_x,xi_y,R,lemma2_lhs,lemma2_rhs,lemma2_ratio,k,phi,lemma3_lhs,lemma3_rhs,lemma3_ratio",
            rows);
  ctx.flags["lemma2"] = worst2 <= 1.0;
  out.write_json("report.json", {{"curve", curve_summary(curve)},
                                 {"density", density_spec(ctx, curve)},
                                 {"cases", cases},
                                 {"lemma2_worst_ratio", worst2},
                                 {"lemma2_pass", worst2 <= 1.0},
                                 {"lemma3_fitted_constant", fit3}});
}

void cmd_zoo_list() {
  json j = json::array();
  for (const auto& n : zoo_names()) j.push_back({{"name", n}, {"canonical", canonical_zoo_name(n)}});
  std::cout << j.dump(2) << '\n';
}

void set_path(json& config, const std::string& dotted, json value) {
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("bad override key '" + dotted + "'");
    if (!node->is_object() || !node->contains(key)) throw ConfigError("unknown config key '" + dotted + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

void validate(const json& config) {
  const json& g = config.at("grids");
  for (const char* k : {"eps", "R"})
    for (double v : get_doubles(g, k))
      if (!(v > 0.0)) throw ConfigError(std::string(k) + " values must be positive");
  if (get<int>(g, "directions") < 360) throw ConfigError("directions must be at least 360");
  if (!(get<double>(g, "eta_min") > 0.0) || get<int>(g, "eta_points_per_octave") < 1)
    throw ConfigError("eta grid must be positive");
  if (get<std::vector<int>>(g, "depths").empty()) throw ConfigError("depths must be nonempty");
  if (get<int>(config, "threads") < 0) throw ConfigError("threads must be nonnegative");
  if (!(get<double>(config.at("tolerances"), "stability") > 0.0)) throw ConfigError("stability tolerance must be positive");
}

}  // namespace

json default_config() {
  return {{"command", ""},
          {"curve",
           {{"zoo", "circle"},
            {"depth", 6},
            {"polyline", ""},
            {"h", 1e-3},
            {"radius", 1.0},
            {"a", 2.0},
            {"b", 1.0},
            {"amplitude", 0.1},
            {"alpha", 0.5},
            {"harmonics", 3}}},
          {"density", ""},
          {"grids",
           {{"eps", json::array()},
            {"R", json::array()},
            {"delta_levels", 12},
            {"xi_count", 32},
            {"ahlfors_xi_count", 256},
            {"directions", 3600},
            {"h0", 0.0},
            {"h_levels", 12},
            {"eta_min", 1e-7},
            {"eta_points_per_octave", 16},
            {"field", "64x64"},
            {"field_box", json::array()},
            {"boundary_points", 32},
            {"depths", {4, 6, 8}},
            {"lemma_cases", 50}}},
          {"tolerances", {{"trace", 1e-6}, {"window", 3}, {"stability", 0.05}, {"quadrature", 1e-10}}},
          {"output", "layerpot_out"},
          {"threads", 1},
          {"strict", false},
          {"boundary_sweep", false},
          {"seed", 1},
          {"log_level", "info"}};
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set_path(config, key, std::move(value));
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  EVP_DigestInit_ex(md, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    if (f.gcount() > 0) EVP_DigestUpdate(md, buf, static_cast<std::size_t>(f.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md, digest, &len);
  EVP_MD_CTX_free(md);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  for (auto& a : copy) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Cauchy-type integrals and double layer potentials on rough Jordan curves", "layerpot"};
  app.set_version_flag("--version", LAYERPOT_VERSION);
  app.require_subcommand(1);

  struct Flags {
    std::string config, zoo, polyline, density, grid, out;
    int depth = 0, xi_count = 0, directions = 0;
    double h = 0.0;
    unsigned threads = 0;
    std::vector<double> eps;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool strict = false, boundary_sweep = false, quiet = false, verbose = false;
  } fl;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"curve", "Build a curve and write its polyline and geometry summary"},
      {"diagnose", "Regularity, Kral, oscillation, modulus, Dini and partition-condition diagnostics"},
      {"potential", "Potential field on a grid and optional boundary-value sweep"},
      {"criterion", "Sweep of the arg-Stieltjes criterion functional over eps"},
      {"lemma-check", "Random checks of the annulus and tail inequalities"},
      {"zoo-list", "List the built-in curves"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "zoo-list") continue;
    sub->add_option("--config", fl.config, "JSON config file");
    sub->add_option("--zoo", fl.zoo, "Built-in curve (see zoo-list)");
    sub->add_option("--depth", fl.depth, "Truncation depth N of the infinitely pieced examples");
    sub->add_option("--polyline", fl.polyline, "Closed polyline CSV (x,y per line, first point repeated)");
    sub->add_option("--mesh", fl.h, "Mesh size h of the polyline");
    sub->add_option("--density", fl.density, "const:c, re, im, holder:alpha[:x0], ex4-log, table:file.csv");
    sub->add_option("--grid", fl.grid, "Field grid NXxNY");
    sub->add_option("--eps", fl.eps, "Radius grid")->delimiter(',');
    sub->add_option("--xi-count", fl.xi_count, "Number of base points");
    sub->add_option("--directions", fl.directions, "Ray directions for the Kral functional");
    sub->add_option("--out,-o", fl.out, "Output directory");
    sub->add_option("--threads,-j", fl.threads, "Worker threads (LAYERPOT_THREADS caps it)");
    sub->add_option("--seed", fl.seed, "Random seed for sampled checks");
    sub->add_option("--set", fl.sets, "Override a config key: a.b=value")->take_all();
    sub->add_flag("--strict", fl.strict, "Exit with code 4 when a required limit does not converge");
    sub->add_flag("--boundary-sweep", fl.boundary_sweep, "Also extrapolate boundary values (potential)");
    sub->add_flag("--quiet,-q", fl.quiet, "Only report errors");
    sub->add_flag("--verbose,-v", fl.verbose, "Debug logging");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (command == "zoo-list") {
    cmd_zoo_list();
    return kExitOk;
  }
  auto given = [&](const char* name) { return sub->count(name) > 0; };

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Outputs> out;
  try {
    json config = default_config();
    if (given("--config")) {
      std::ifstream f(fl.config);
      if (!f) throw ConfigError("cannot read config file " + fl.config);
      json file = json::parse(f, nullptr, false);
      if (file.is_discarded() || !file.is_object()) throw ConfigError("config file is not a JSON object");
      config.merge_patch(file);
    }
    config["command"] = command;
    if (given("--zoo")) config["curve"]["zoo"] = fl.zoo;
    if (given("--depth")) config["curve"]["depth"] = fl.depth;
    if (given("--polyline")) config["curve"]["polyline"] = fl.polyline;
    if (given("--mesh")) config["curve"]["h"] = fl.h;
    if (given("--density")) config["density"] = fl.density;
    if (given("--grid")) config["grids"]["field"] = fl.grid;
    if (given("--eps")) config["grids"]["eps"] = fl.eps;
    if (given("--xi-count")) config["grids"]["xi_count"] = fl.xi_count;
    if (given("--directions")) config["grids"]["directions"] = fl.directions;
    if (given("--out")) config["output"] = fl.out;
    if (given("--threads")) config["threads"] = fl.threads;
    if (given("--seed")) config["seed"] = fl.seed;
    if (fl.strict) config["strict"] = true;
    if (fl.boundary_sweep) config["boundary_sweep"] = true;
    if (fl.quiet) config["log_level"] = "error";
    if (fl.verbose) config["log_level"] = "debug";
    for (const auto& s : fl.sets) apply_override(config, s);
    validate(config);

    logger()->set_level(spdlog::level::from_str(get<std::string>(config, "log_level")));
    Context ctx;
    ctx.config = config;
    ctx.threads = resolve_threads(get<unsigned>(config, "threads"));
    out.emplace(get<std::string>(config, "output"));
    logger()->info("{} -> {} ({} threads)", command, out->dir().string(), ctx.threads);

    if (command == "curve") cmd_curve(ctx, *out);
    else if (command == "diagnose") cmd_diagnose(ctx, *out);
    else if (command == "potential") cmd_potential(ctx, *out);
    else if (command == "criterion") cmd_criterion(ctx, *out);
    else if (command == "lemma-check") cmd_lemma_check(ctx, *out);

    const bool strict = get<bool>(config, "strict");
    if (strict && ctx.nonconverged) throw NonConvergenceError("a required limit did not converge (--strict)");

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = {{"artifact", "layerpot"},
                     {"version", LAYERPOT_VERSION},
                     {"command", command},
                     {"config", config},
                     {"threads", ctx.threads},
                     {"wall_time_seconds", wall},
                     {"flags", ctx.flags},
                     {"nonconverged", ctx.nonconverged},
                     {"files", out->inventory()}};
    std::ofstream mf(out->dir() / "manifest.json");
    if (!mf) throw ConfigError("cannot write manifest");
    mf << manifest.dump(2) << '\n';
    logger()->info("done in {:.2f} s", wall);
    return kExitOk;
  } catch (const ConstructionError& e) {
    logger()->error("construction error: {}", e.what());
    if (out) out->discard();
    return kExitConstruction;
  } catch (const NonConvergenceError& e) {
    logger()->error("non-convergence: {}", e.what());
    if (out) out->discard();
    return kExitNonConvergence;
  } catch (const Error& e) {
    logger()->error("{}", e.what());
    if (out) out->discard();
    return kExitConfig;
  } catch (const json::exception& e) {
    logger()->error("configuration error: {}", e.what());
    if (out) out->discard();
    return kExitConfig;
  }
}

}  // namespace layerpot::cli
