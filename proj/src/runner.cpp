#include "kt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "kt/classify.hpp"
#include "kt/csv.hpp"
#include "kt/errors.hpp"
#include "kt/expr.hpp"
#include "kt/frame.hpp"
#include "kt/gauss_bonnet.hpp"
#include "kt/transport.hpp"
#include "kt/variation.hpp"

namespace kt {

namespace {

using nlohmann::json;

constexpr const char* kCommands[] = {
    "transport",    "holonomy",      "classify",      "gauss-bonnet",
    "rigid-var",    "jacobi-check",  "killing-check", "curvature-defect",
};

// ---------------------------------------------------------------------------
// Strict config access: unknown keys and wrong types are schema errors.
// ---------------------------------------------------------------------------

std::string join_key(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* k) { return it.key() == k; });
    if (!known)
      throw SchemaError("unknown key '" + join_key(where, it.key()) + "'");
  }
}

const json& need(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError("missing key '" + join_key(where, key) + "'");
  return *it;
}

double get_num(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_number())
    throw SchemaError("'" + join_key(where, key) + "' must be a number");
  return v.get<double>();
}

double get_pos(const json& obj, const char* key, const std::string& where) {
  const double x = get_num(obj, key, where);
  if (!(x > 0.0))
    throw SchemaError("'" + join_key(where, key) + "' must be positive");
  return x;
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const double x = get_num(obj, key, where);
  const double r = std::nearbyint(x);
  if (x != r || std::abs(x) > 1e9)
    throw SchemaError("'" + join_key(where, key) + "' must be an integer");
  return static_cast<int>(r);
}

std::string get_str(const json& obj, const char* key,
                    const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_string())
    throw SchemaError("'" + join_key(where, key) + "' must be a string");
  return v.get<std::string>();
}

Vec get_vec2(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw SchemaError("'" + join_key(where, key) +
                      "' must be an array of two numbers");
  Vec p(2);
  p << v[0].get<double>(), v[1].get<double>();
  return p;
}

Jet2 get_jet3(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_array() || v.size() != 3)
    throw SchemaError("'" + join_key(where, key) +
                      "' must be an array of three numbers");
  Jet2 jet;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number())
      throw SchemaError("'" + join_key(where, key) +
                        "' must be an array of three numbers");
    jet[i] = v[i].get<double>();
  }
  return jet;
}

// ---------------------------------------------------------------------------
// Output helpers.
// ---------------------------------------------------------------------------

void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw SchemaError("cannot open output file '" + name + "'");
  os << content;
  if (!os) throw SchemaError("failed writing output file '" + name + "'");
}

void write_json(const std::filesystem::path& dir, const std::string& name,
                const json& j) {
  write_text(dir, name, j.dump(2) + "\n");
}

std::string csv_string(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  emit_csv(os, header, rows);
  return os.str();
}

template <typename Derived>
json json_vec(const Eigen::MatrixBase<Derived>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back(static_cast<double>(v[i]));
  return a;
}

json json_mat3(const Matrix3d& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int k = 0; k < 3; ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

// ---------------------------------------------------------------------------
// Config blocks.
// ---------------------------------------------------------------------------

Domain build_domain(json& spec) {
  check_keys(spec, "surface.domain",
             {"u", "v", "periodic_u", "periodic_v", "period_u", "period_v"});
  Domain dom;
  const char* names[2] = {"u", "v"};
  const char* flag_names[2] = {"periodic_u", "periodic_v"};
  const char* period_names[2] = {"period_u", "period_v"};
  for (int i = 0; i < 2; ++i) {
    const json& range = need(spec, names[i], "surface.domain");
    if (!range.is_array() || range.size() != 2 || !range[0].is_number() ||
        !range[1].is_number())
      throw SchemaError(std::string("'surface.domain.") + names[i] +
                        "' must be [lo, hi]");
    Axis ax;
    ax.lo = range[0].get<double>();
    ax.hi = range[1].get<double>();
    if (!(ax.hi > ax.lo))
      throw SchemaError(std::string("'surface.domain.") + names[i] +
                        "' must have hi > lo");
    if (!spec.contains(flag_names[i])) spec[flag_names[i]] = false;
    if (!spec[flag_names[i]].is_boolean())
      throw SchemaError(std::string("'surface.domain.") + flag_names[i] +
                        "' must be a boolean");
    ax.periodic = spec[flag_names[i]].get<bool>();
    if (ax.periodic) {
      if (!spec.contains(period_names[i])) spec[period_names[i]] = ax.hi - ax.lo;
      ax.period = get_pos(spec, period_names[i], "surface.domain");
    } else if (spec.contains(period_names[i])) {
      throw SchemaError(std::string("'surface.domain.") + period_names[i] +
                        "' is only valid on a periodic axis");
    }
    dom.axes.push_back(ax);
  }
  return dom;
}

MetricChart build_surface_resolved(json& spec) {
  if (!spec.is_object())
    throw SchemaError("'surface' must be an object with a 'kind'");
  const std::string kind = get_str(spec, "kind", "surface");
  if (kind == "sphere") {
    check_keys(spec, "surface", {"kind", "radius"});
    if (!spec.contains("radius")) spec["radius"] = 1.0;
    return MetricChart::sphere(get_pos(spec, "radius", "surface"));
  }
  if (kind == "torus") {
    check_keys(spec, "surface", {"kind", "R", "r"});
    if (!spec.contains("R")) spec["R"] = 2.0;
    if (!spec.contains("r")) spec["r"] = 1.0;
    const double R = get_pos(spec, "R", "surface");
    const double r = get_pos(spec, "r", "surface");
    if (r >= R)
      throw SchemaError("'surface.r' must be smaller than 'surface.R'");
    return MetricChart::torus(R, r);
  }
  if (kind == "plane") {
    check_keys(spec, "surface", {"kind", "half_width"});
    if (!spec.contains("half_width")) spec["half_width"] = 10.0;
    return MetricChart::plane(get_pos(spec, "half_width", "surface"));
  }
  if (kind == "flat_torus") {
    check_keys(spec, "surface", {"kind", "period"});
    if (!spec.contains("period")) spec["period"] = 2 * M_PI;
    return MetricChart::flat_torus(get_pos(spec, "period", "surface"));
  }
  if (kind == "half_plane") {
    check_keys(spec, "surface", {"kind"});
    return MetricChart::half_plane();
  }
  if (kind == "custom") {
    check_keys(spec, "surface", {"kind", "name", "g11", "g12", "g22", "domain"});
    if (!spec.contains("name")) spec["name"] = "custom";
    if (!spec.contains("g12")) spec["g12"] = "0";
    const std::string name = get_str(spec, "name", "surface");
    const std::string g11 = get_str(spec, "g11", "surface");
    const std::string g12 = get_str(spec, "g12", "surface");
    const std::string g22 = get_str(spec, "g22", "surface");
    json& dom_spec = spec["domain"];
    if (!dom_spec.is_object())
      throw SchemaError("'surface.domain' must be an object");
    Domain dom = build_domain(dom_spec);
    return MetricChart::from_expressions(name, g11, g12, g22, dom);
  }
  throw SchemaError("unknown surface kind '" + kind + "'");
}

SampledCurve build_curve_resolved(const MetricChart& chart, const json& spec) {
  if (!spec.is_object())
    throw SchemaError("'curve' must be an object with a 'kind'");
  const std::string kind = get_str(spec, "kind", "curve");
  CurveOptions opts;
  opts.steps = get_int(spec, "steps", "curve");
  if (opts.steps < 4) throw SchemaError("'curve.steps' must be at least 4");

  if (kind == "coordinate") {
    check_keys(spec, "curve", {"kind", "u0", "v0", "span", "steps"});
    const double u0 = get_num(spec, "u0", "curve");
    const double v0 = get_num(spec, "v0", "curve");
    const double span = get_num(spec, "span", "curve");
    if (span == 0.0) throw SchemaError("'curve.span' must be nonzero");
    auto fn = [u0, v0, span](double t) {
      Vec p(2);
      p << u0, v0 + span * t;
      return p;
    };
    return reparam_arclength(chart, fn, 0.0, 1.0, opts);
  }
  if (kind == "segment") {
    check_keys(spec, "curve", {"kind", "a", "b", "steps"});
    return straight_segment(chart, get_vec2(spec, "a", "curve"),
                            get_vec2(spec, "b", "curve"), opts);
  }
  if (kind == "geodesic" || kind == "curvature") {
    const Vec p0 = get_vec2(spec, "p0", "curve");
    const double theta = get_num(spec, "theta", "curve");
    const double length = get_pos(spec, "length", "curve");
    const Frame2D frame = orthonormal_frame(chart, p0);
    Vec dir(2);
    dir = std::cos(theta) * Vec(frame.e1) + std::sin(theta) * Vec(frame.e2);
    if (kind == "geodesic") {
      check_keys(spec, "curve", {"kind", "p0", "theta", "length", "steps"});
      return geodesic(chart, p0, dir, length, opts);
    }
    check_keys(spec, "curve", {"kind", "p0", "theta", "kappa", "length", "steps"});
    const std::string text = get_str(spec, "kappa", "curve");
    const Expr expr = Expr::parse(text);
    if (expr.arity() > 1)
      throw SchemaError(
          "'curve.kappa' must depend on arclength only (variable u)");
    auto kappa = [expr](double s) { return expr.eval({&s, 1}); };
    return curve_from_curvature(chart, p0, dir, kappa, length, opts);
  }
  throw SchemaError("unknown curve kind '" + kind + "'");
}

// Lattice shared by the scanning commands: periodic axes tile the range
// end-exclusive, bounded axes use an inclusive linspace.
double lattice_coord(double a, double b, int n, bool periodic, int i) {
  return periodic ? a + (b - a) * i / n : a + (b - a) * i / (n - 1);
}

// Resolve the scan window: explicit bounds must come as a full set; without
// them the differentiation-safe interior is used and written back so the
// manifest records the window actually scanned.
GridSpec resolve_grid(const MetricChart& chart, json& grid,
                      const std::string& where) {
  const int nu = get_int(grid, "nu", where);
  const int nv = get_int(grid, "nv", where);
  const bool has_bounds = grid.contains("u0") || grid.contains("u1") ||
                          grid.contains("v0") || grid.contains("v1");
  GridSpec spec;
  if (has_bounds) {
    spec.nu = nu;
    spec.nv = nv;
    spec.u0 = get_num(grid, "u0", where);
    spec.u1 = get_num(grid, "u1", where);
    spec.v0 = get_num(grid, "v0", where);
    spec.v1 = get_num(grid, "v1", where);
    if (!(spec.u1 > spec.u0) || !(spec.v1 > spec.v0))
      throw SchemaError("'" + where + "' bounds must satisfy u1 > u0, v1 > v0");
  } else {
    spec = safe_grid(chart, nu, nv);
    grid["u0"] = spec.u0;
    grid["u1"] = spec.u1;
    grid["v0"] = spec.v0;
    grid["v1"] = spec.v1;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Commands.  Each returns the list of files it wrote.
// ---------------------------------------------------------------------------

std::vector<std::string> cmd_transport(const MetricChart& chart, json& config,
                                       const std::filesystem::path& dir) {
  const SampledCurve curve = build_curve_resolved(chart, config.at("curve"));
  const Jet2 jet0 = get_jet3(config, "jet0", "");
  const TransportResult res = killing_transport(chart, curve, jet0);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(res.t.size());
  for (size_t i = 0; i < res.t.size(); ++i) {
    rows.push_back({csv_number(res.t[i]), csv_number(res.p[i][0]),
                    csv_number(res.p[i][1]), csv_number(res.jet[i][0]),
                    csv_number(res.jet[i][1]), csv_number(res.jet[i][2])});
  }
  write_text(dir, "transport.csv",
             csv_string({"t", "u", "v", "xi1", "xi2", "xi12"}, rows));

  json report;
  report["length"] = curve.length;
  report["nodes"] = res.t.size();
  report["det_drift"] = res.det_drift;
  report["final_jet"] = json_vec(res.jet.back());
  report["final_matrix"] = json_mat3(res.final_matrix());
  write_json(dir, "report.json", report);
  return {"transport.csv", "report.json"};
}

std::vector<std::string> cmd_holonomy(const MetricChart& chart, json& config,
                                      const std::filesystem::path& dir) {
  const SampledCurve curve = build_curve_resolved(chart, config.at("curve"));
  const HolonomyResult h = holonomy(chart, curve);
  const double tol = get_pos(config, "fixed_tol", "");
  const FixedDirections fixed = fixed_directions(h.U, tol);

  json report;
  report["U"] = json_mat3(h.U);
  report["identity_distance"] =
      (h.U - Matrix3d::Identity()).cwiseAbs().maxCoeff();
  report["det_drift"] = h.det_drift;
  report["angle"] = h.angle;
  report["fixed_dims"] = fixed.dims;
  json basis = json::array();
  for (const auto& b : fixed.basis) basis.push_back(json_vec(b));
  report["fixed_basis"] = basis;
  report["singular_values"] = json_vec(fixed.singular_values);
  write_json(dir, "holonomy.json", report);
  return {"holonomy.json"};
}

std::vector<std::string> cmd_classify(const MetricChart& chart, json& config,
                                      const std::filesystem::path& dir) {
  json& grid = config["grid"];
  check_keys(grid, "grid", {"nu", "nv", "u0", "u1", "v0", "v1"});
  const GridSpec spec = resolve_grid(chart, grid, "grid");

  json& options = config["options"];
  check_keys(options, "options",
             {"rank_tol", "sigma_floor", "grad_tol", "gap_min", "identity_gate"});
  ClassifyOptions opts;
  opts.rank_tol = get_pos(options, "rank_tol", "options");
  opts.sigma_floor = get_pos(options, "sigma_floor", "options");
  opts.grad_tol = get_pos(options, "grad_tol", "options");
  opts.gap_min = get_pos(options, "gap_min", "options");
  opts.identity_gate = get_pos(options, "identity_gate", "options");

  const ScanResult scan = scan_region(chart, spec, opts);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(scan.entries.size());
  for (const auto& e : scan.entries) {
    rows.push_back({csv_number(e.p[0]), csv_number(e.p[1]),
                    csv_number(e.c.sigma[0]), csv_number(e.c.sigma[1]),
                    csv_number(e.c.sigma[2]), std::to_string(e.c.rank),
                    to_string(e.c.cls)});
  }
  write_text(dir, "classify.csv",
             csv_string({"u", "v", "sigma1", "sigma2", "sigma3_of_top3",
                         "rank", "class"},
                        rows));

  json report;
  report["points"] = scan.entries.size();
  report["histogram"] = {{"ThreeParam", scan.histogram[0]},
                         {"OneParam", scan.histogram[1]},
                         {"Trivial", scan.histogram[2]},
                         {"Indeterminate", scan.histogram[3]}};
  json rank_one = json::array();
  for (const auto& p : scan.rank_one_points) rank_one.push_back(json_vec(p));
  report["rank_one_points"] = rank_one;
  report["skipped"] = scan.skipped;
  report["max_identity_residual"] = scan.max_identity_residual;
  report["grid"] = {{"nu", spec.nu}, {"nv", spec.nv}, {"u0", spec.u0},
                    {"u1", spec.u1}, {"v0", spec.v0}, {"v1", spec.v1}};
  write_json(dir, "classify.json", report);
  return {"classify.csv", "classify.json"};
}

std::vector<std::string> cmd_gauss_bonnet(const MetricChart& chart,
                                          json& config,
                                          const std::filesystem::path& dir) {
  Triangulation tri;
  if (config.contains("mesh")) {
    const std::string path = get_str(config, "mesh", "");
    const int steps = get_int(config, "mesh_steps", "");
    if (steps < 4) throw SchemaError("'mesh_steps' must be at least 4");
    tri = load_triangulation(chart, path, steps);
  } else {
    json& grid = config["grid"];
    check_keys(grid, "grid", {"nu", "nv", "edge_steps"});
    const int nu = get_int(grid, "nu", "grid");
    const int nv = get_int(grid, "nv", "grid");
    const int edge_steps = get_int(grid, "edge_steps", "grid");
    if (edge_steps < 4) throw SchemaError("'grid.edge_steps' must be at least 4");
    tri = torus_grid(chart, nu, nv, edge_steps);
  }

  const SurfaceReport rep = surface_sum(chart, tri);
  json report;
  report["total"] = rep.total;
  report["expected"] = rep.expected;
  report["residual"] = rep.residual;
  report["euler"] = rep.euler;
  report["triangles"] = rep.triangles.size();
  report["max_stokes_residual"] = rep.max_stokes_residual;
  report["max_edge_residual"] = rep.max_edge_residual;
  report["max_pair_correction"] = rep.max_pair_correction;
  report["max_pair_m"] = rep.max_pair_m;
  write_json(dir, "gauss_bonnet.json", report);
  return {"gauss_bonnet.json"};
}

std::vector<std::string> cmd_rigid_var(const MetricChart& chart, json& config,
                                       const std::filesystem::path& dir) {
  const SampledCurve curve = build_curve_resolved(chart, config.at("curve"));
  const Jet2 jet0 = get_jet3(config, "jet0", "");
  const double dtau = get_pos(config, "dtau", "");

  const TransportResult res = killing_transport(chart, curve, jet0);
  const CurveFamily family = rigid_variation(chart, curve, jet0, dtau);
  const std::vector<Vec> var = variation_field(chart, family);

  double sup_error = 0.0;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(res.t.size());
  for (size_t i = 0; i < res.t.size(); ++i) {
    const Vec& p = res.p[i];
    const Frame2D frame = orthonormal_frame(chart, p);
    const Vec field =
        res.jet[i][0] * Vec(frame.e1) + res.jet[i][1] * Vec(frame.e2);
    const Vec diff = var[2 * i] - field;
    const double err = std::sqrt(chart.inner(p, diff, diff));
    sup_error = std::max(sup_error, err);
    rows.push_back({csv_number(res.t[i]), csv_number(p[0]), csv_number(p[1]),
                    csv_number(var[2 * i][0]), csv_number(var[2 * i][1]),
                    csv_number(field[0]), csv_number(field[1]),
                    csv_number(err)});
  }
  write_text(dir, "rigid_var.csv",
             csv_string({"t", "u", "v", "var_u", "var_v", "field_u", "field_v",
                         "err"},
                        rows));

  json report;
  report["dtau"] = dtau;
  report["nodes"] = res.t.size();
  report["sup_error"] = sup_error;
  write_json(dir, "rigid_var.json", report);
  return {"rigid_var.csv", "rigid_var.json"};
}

std::vector<std::string> cmd_jacobi(const MetricChart& chart, json& config,
                                    const std::filesystem::path& dir) {
  const SampledCurve curve = build_curve_resolved(chart, config.at("curve"));
  const Jet2 jet0 = get_jet3(config, "jet0", "");
  const JacobiReport rep = jacobi_check(chart, curve, jet0);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(rep.t.size());
  for (size_t i = 0; i < rep.t.size(); ++i)
    rows.push_back({csv_number(rep.t[i]), csv_number(rep.residual[i])});
  write_text(dir, "jacobi.csv", csv_string({"t", "residual"}, rows));

  json report;
  report["max_residual"] = rep.max_residual;
  report["nodes"] = rep.t.size();
  write_json(dir, "jacobi.json", report);
  return {"jacobi.csv", "jacobi.json"};
}

std::vector<std::string> cmd_killing(const MetricChart& chart, json& config,
                                     const std::filesystem::path& dir) {
  json& field_spec = config["field"];
  check_keys(field_spec, "field", {"xi1", "xi2"});
  const VectorFieldJet field = VectorFieldJet::from_expressions(
      chart, get_str(field_spec, "xi1", "field"),
      get_str(field_spec, "xi2", "field"));

  json& grid = config["grid"];
  check_keys(grid, "grid", {"nu", "nv", "u0", "u1", "v0", "v1"});
  const GridSpec spec = resolve_grid(chart, grid, "grid");
  const auto& axes = chart.domain().axes;

  double max_first = 0.0, max_second = 0.0;
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < spec.nu; ++i) {
    for (int k = 0; k < spec.nv; ++k) {
      Vec p(2);
      p << lattice_coord(spec.u0, spec.u1, spec.nu, axes[0].periodic, i),
          lattice_coord(spec.v0, spec.v1, spec.nv, axes[1].periodic, k);
      const KillingResidual res = killing_residual(chart, field, p);
      max_first = std::max(max_first, res.first_order);
      max_second = std::max(max_second, res.second_order);
      rows.push_back({csv_number(p[0]), csv_number(p[1]),
                      csv_number(res.first_order),
                      csv_number(res.second_order)});
    }
  }
  write_text(dir, "killing.csv",
             csv_string({"u", "v", "first_order", "second_order"}, rows));

  json report;
  report["points"] = rows.size();
  report["max_first_order"] = max_first;
  report["max_second_order"] = max_second;
  write_json(dir, "killing.json", report);
  return {"killing.csv", "killing.json"};
}

std::vector<std::string> cmd_defect(const MetricChart& chart, json& config,
                                    const std::filesystem::path& dir) {
  const Vec p = get_vec2(config, "point", "");
  const double h = get_pos(config, "h", "");
  const int side_steps = get_int(config, "side_steps", "");
  if (side_steps < 4) throw SchemaError("'side_steps' must be at least 4");

  const Matrix3d defect = curvature_defect(chart, p, h, side_steps);

  // The h->0 limit row is read off the curvature ladder; with 'jet_tol' set,
  // the ladder's internal consistency is enforced at that tolerance before
  // the limit is reported.
  JetOptions jo;
  jo.enforce_identities = config.contains("jet_tol");
  if (jo.enforce_identities) jo.identity_tol = get_pos(config, "jet_tol", "");
  const CurvatureJet jet = curvature_jet(chart, p, jo);
  Matrix3d limit = Matrix3d::Zero();
  limit(2, 0) = -jet.K1;
  limit(2, 1) = -jet.K2;

  json report;
  report["h"] = h;
  report["side_steps"] = side_steps;
  report["matrix"] = json_mat3(defect);
  report["limit"] = json_mat3(limit);
  report["limit_error"] = (defect - limit).cwiseAbs().maxCoeff();
  write_json(dir, "defect.json", report);
  return {"defect.json"};
}

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

void check_top_level(const json& config, const std::string& cmd) {
  std::vector<const char*> allowed = {"command", "surface", "output", "seed"};
  auto add = [&](std::initializer_list<const char*> keys) {
    allowed.insert(allowed.end(), keys.begin(), keys.end());
  };
  if (cmd == "transport") add({"curve", "jet0"});
  if (cmd == "holonomy") add({"curve", "fixed_tol"});
  if (cmd == "classify") add({"grid", "options"});
  if (cmd == "gauss-bonnet") add({"grid", "mesh", "mesh_steps"});
  if (cmd == "rigid-var") add({"curve", "jet0", "dtau"});
  if (cmd == "jacobi-check") add({"curve", "jet0"});
  if (cmd == "killing-check") add({"field", "grid"});
  if (cmd == "curvature-defect") add({"point", "h", "side_steps", "jet_tol"});
  for (auto it = config.begin(); it != config.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw SchemaError("unknown key '" + it.key() + "'");
  }
}

void check_required_blocks(const json& config, const std::string& cmd) {
  auto require = [&](const char* key) {
    if (!config.contains(key))
      throw SchemaError("command '" + cmd + "' requires a '" + key + "' block");
  };
  if (cmd == "transport" || cmd == "rigid-var" || cmd == "jacobi-check") {
    require("curve");
    require("jet0");
  }
  if (cmd == "holonomy") require("curve");
  if (cmd == "killing-check") require("field");
  if (cmd == "curvature-defect") require("point");
  if (cmd == "gauss-bonnet" && config.contains("mesh") &&
      config.contains("grid"))
    throw SchemaError("give either 'mesh' or 'grid', not both");
}

json resolve_params(json& config, const std::string& cmd) {
  const bool mesh_mode = cmd == "gauss-bonnet" && config.contains("mesh");
  json params = json::object();
  for (const auto& spec : run_parameters()) {
    if (std::string_view(spec.command) != cmd &&
        std::string_view(spec.command) != "*")
      continue;
    const std::string_view ptr_text(spec.pointer);
    if (mesh_mode && ptr_text.substr(0, 6) == "/grid/") continue;
    if (!mesh_mode && ptr_text == "/mesh_steps") continue;
    const json::json_pointer ptr(spec.pointer);
    if (!config.contains(ptr)) config[ptr] = spec.def;
    if (!config.at(ptr).is_number())
      throw SchemaError("'" + std::string(spec.pointer) +
                        "' must be a number");
    params[spec.pointer] = config.at(ptr);
  }
  return params;
}

}  // namespace

const std::vector<ParamSpec>& run_parameters() {
  static const std::vector<ParamSpec> table = {
      {"transport", "/curve/steps", 400},
      {"holonomy", "/curve/steps", 400},
      {"holonomy", "/fixed_tol", 1e-6},
      {"classify", "/grid/nu", 20},
      {"classify", "/grid/nv", 20},
      {"classify", "/options/rank_tol", 1e-6},
      {"classify", "/options/sigma_floor", 3e-4},
      {"classify", "/options/grad_tol", 1e-6},
      {"classify", "/options/gap_min", 10.0},
      {"classify", "/options/identity_gate", 2e-2},
      {"gauss-bonnet", "/grid/nu", 10},
      {"gauss-bonnet", "/grid/nv", 10},
      {"gauss-bonnet", "/grid/edge_steps", 60},
      {"gauss-bonnet", "/mesh_steps", 60},
      {"rigid-var", "/curve/steps", 400},
      {"rigid-var", "/dtau", 1e-3},
      {"jacobi-check", "/curve/steps", 400},
      {"killing-check", "/grid/nu", 10},
      {"killing-check", "/grid/nv", 10},
      {"curvature-defect", "/h", 1e-2},
      {"curvature-defect", "/side_steps", 64},
  };
  return table;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SchemaError("cannot open config file '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw SchemaError("config file '" + path + "' is not valid JSON at byte " +
                      std::to_string(e.byte) + ": " + e.what());
  }
}

MetricChart build_surface(const nlohmann::json& spec) {
  json copy = spec;
  return build_surface_resolved(copy);
}

SampledCurve build_curve(const MetricChart& chart, const nlohmann::json& spec) {
  json copy = spec;
  if (!copy.is_object()) throw SchemaError("'curve' must be an object");
  if (!copy.contains("steps")) copy["steps"] = 400;
  return build_curve_resolved(chart, copy);
}

RunOutcome run_config(nlohmann::json config, const std::string& out_dir) {
  RunOutcome out;
  try {
    if (!config.is_object()) throw SchemaError("config must be a JSON object");
    // Where the reports land is a delivery detail: drop it so the recorded
    // config (and its hash) describe the computation alone, and reruns into
    // different directories stay byte-identical.
    config.erase("output");
    const std::string cmd = get_str(config, "command", "");
    const bool known = std::any_of(std::begin(kCommands), std::end(kCommands),
                                   [&](const char* c) { return cmd == c; });
    if (!known) throw SchemaError("unknown command '" + cmd + "'");

    check_top_level(config, cmd);
    check_required_blocks(config, cmd);
    const json params = resolve_params(config, cmd);

    // The seed does not drive any randomness today, but it is part of the
    // reproducibility contract: it participates in the config hash and is
    // recorded in the manifest.
    if (!config.contains("seed")) config["seed"] = 0;
    if (!config["seed"].is_number_integer())
      throw SchemaError("'seed' must be an integer");
    const std::int64_t seed = config["seed"].get<std::int64_t>();

    const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);

    if (!config.contains("surface"))
      throw SchemaError("config requires a 'surface' block");
    const MetricChart chart = build_surface_resolved(config["surface"]);

    std::vector<std::string> outputs;
    if (cmd == "transport") outputs = cmd_transport(chart, config, dir);
    if (cmd == "holonomy") outputs = cmd_holonomy(chart, config, dir);
    if (cmd == "classify") outputs = cmd_classify(chart, config, dir);
    if (cmd == "gauss-bonnet") outputs = cmd_gauss_bonnet(chart, config, dir);
    if (cmd == "rigid-var") outputs = cmd_rigid_var(chart, config, dir);
    if (cmd == "jacobi-check") outputs = cmd_jacobi(chart, config, dir);
    if (cmd == "killing-check") outputs = cmd_killing(chart, config, dir);
    if (cmd == "curvature-defect") outputs = cmd_defect(chart, config, dir);

    json manifest;
    manifest["command"] = cmd;
    manifest["config"] = config;
    manifest["config_hash"] = hash_hex(config.dump());
    manifest["version"] = kLibraryVersion;
    manifest["seed"] = seed;
    manifest["parameters"] = params;
    outputs.push_back("manifest.json");
    manifest["outputs"] = outputs;
    write_json(dir, "manifest.json", manifest);

    out.outputs = std::move(outputs);
  } catch (const SchemaError& e) {
    out = {1, "schema", e.what(), {}};
  } catch (const nlohmann::json::exception& e) {
    out = {1, "schema", e.what(), {}};
  } catch (const ToleranceExceeded& e) {
    out = {3, "tolerance", e.what(), {}};
  } catch (const GeometryError& e) {
    out = {2, "geometry", e.what(), {}};
  } catch (const std::exception& e) {
    out = {1, "schema", e.what(), {}};
  }
  return out;
}

}  // namespace kt
