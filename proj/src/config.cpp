#include "algmech/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace algmech {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json& field(const json& doc, const std::string& path, const std::string& key) {
  if (!doc.is_object()) fail(path, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() == 0)
    fail(path, "expected a positive integer");
  return j.get<std::size_t>();
}

std::size_t as_dim(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Expr parse_field_expr(const json& j, const std::string& path) {
  const std::string text = as_string(j, path);
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    fail(path, std::string("expression error: ") + e.what());
  }
}

ExprMat as_expr_matrix(const json& j, const std::string& path, std::size_t rows,
                       std::size_t cols) {
  if (!j.is_array() || j.size() != rows)
    fail(path, "expected an array of " + std::to_string(rows) + " rows");
  ExprMat out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != cols)
      fail(rpath, "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k)
      out(i, k) = parse_field_expr(row[k], rpath + "[" + std::to_string(k) + "]");
  }
  return out;
}

ExprCube as_expr_cube(const json& j, const std::string& path, std::size_t m) {
  if (!j.is_array() || j.size() != m)
    fail(path, "expected an array of " + std::to_string(m) + " slices");
  ExprCube out(m, m, m);
  for (std::size_t k = 0; k < m; ++k) {
    ExprMat slice = as_expr_matrix(j[k], path + "[" + std::to_string(k) + "]", m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t jj = 0; jj < m; ++jj) out(k, i, jj) = slice(i, jj);
  }
  return out;
}

MatD as_number_matrix(const json& j, const std::string& path, std::size_t rows,
                      std::size_t cols) {
  if (!j.is_array() || j.size() != rows)
    fail(path, "expected an array of " + std::to_string(rows) + " rows");
  MatD out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != cols)
      fail(rpath, "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k)
      out(i, k) = as_number(row[k], rpath + "[" + std::to_string(k) + "]");
  }
  return out;
}

Grid3<double> as_number_cube(const json& j, const std::string& path, std::size_t m) {
  if (!j.is_array() || j.size() != m)
    fail(path, "expected an array of " + std::to_string(m) + " slices");
  Grid3<double> out(m, m, m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    MatD slice = as_number_matrix(j[k], path + "[" + std::to_string(k) + "]", m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t jj = 0; jj < m; ++jj) out(k, i, jj) = slice(i, jj);
  }
  return out;
}

std::vector<double> as_vector(const json& j, const std::string& path, std::size_t len) {
  if (!j.is_array() || j.size() != len)
    fail(path, "expected an array of " + std::to_string(len) + " numbers");
  std::vector<double> out(len);
  for (std::size_t i = 0; i < len; ++i)
    out[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

SampleBox as_box(const json& j, const std::string& path, std::size_t dim) {
  if (!j.is_array() || j.size() != dim)
    fail(path, "expected " + std::to_string(dim) + " [lo, hi] pairs");
  SampleBox box;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string ppath = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) fail(ppath, "expected [lo, hi]");
    const double lo = as_number(j[i][0], ppath + "[0]");
    const double hi = as_number(j[i][1], ppath + "[1]");
    if (!(lo < hi)) fail(ppath, "lo must be below hi");
    box.range.push_back({lo, hi});
  }
  return box;
}

Grid3<double> algebra_by_name(const std::string& name, const std::string& path) {
  if (name == "so3") return so3_constants();
  if (name == "sl2") return sl2_constants();
  fail(path, "unknown algebra '" + name + "' (expected so3 or sl2)");
}

struct PresetResult {
  Algebroid algebroid;
  std::optional<Metric> metric;
  std::optional<WongSetup> wong;
};

WongSetup parse_wong_setup(const json& preset, const std::string& path) {
  WongSetup w;
  w.base_dim = as_count(field(preset, path, "base_dim"), path + ".base_dim");
  if (preset.contains("algebra")) {
    w.C = algebra_by_name(as_string(preset["algebra"], path + ".algebra"),
                          path + ".algebra");
  } else if (preset.contains("algebra_constants")) {
    const json& cj = preset["algebra_constants"];
    if (!cj.is_array() || cj.empty()) fail(path + ".algebra_constants", "expected m^3 array");
    w.C = as_number_cube(cj, path + ".algebra_constants", cj.size());
  } else {
    fail(path, "wong preset needs 'algebra' or 'algebra_constants'");
  }
  w.algebra_dim = w.C.dim0();
  w.base_metric = as_expr_matrix(field(preset, path, "base_metric"),
                                 path + ".base_metric", w.base_dim, w.base_dim);
  if (preset.contains("algebra_metric")) {
    w.h = as_number_matrix(preset["algebra_metric"], path + ".algebra_metric",
                           w.algebra_dim, w.algebra_dim);
  } else {
    w.h = identity(w.algebra_dim);
  }
  w.A = as_expr_matrix(field(preset, path, "connection"), path + ".connection",
                       w.algebra_dim, w.base_dim);
  try {
    validate_wong(w);
  } catch (const ShapeError& e) {
    fail(path, e.what());
  }
  return w;
}

PresetResult expand_preset(const json& preset, const std::string& path,
                           const CheckSpec& check) {
  const std::string name = as_string(field(preset, path, "name"), path + ".name");
  if (name == "tangent_bundle") {
    const std::size_t dim = as_count(field(preset, path, "dim"), path + ".dim");
    return {tangent_bundle(dim), std::nullopt, std::nullopt};
  }
  if (name == "lie_algebra") {
    Grid3<double> c;
    if (preset.contains("algebra")) {
      c = algebra_by_name(as_string(preset["algebra"], path + ".algebra"),
                          path + ".algebra");
    } else if (preset.contains("algebra_constants")) {
      const json& cj = preset["algebra_constants"];
      if (!cj.is_array() || cj.empty())
        fail(path + ".algebra_constants", "expected m^3 array");
      c = as_number_cube(cj, path + ".algebra_constants", cj.size());
    } else {
      fail(path, "lie_algebra preset needs 'algebra' or 'algebra_constants'");
    }
    return {lie_algebra(c), std::nullopt, std::nullopt};
  }
  if (name == "geodesic") {
    const std::size_t dim = as_count(field(preset, path, "dim"), path + ".dim");
    Algebroid alg = tangent_bundle(dim);
    ExprMat g = as_expr_matrix(field(preset, path, "metric"), path + ".metric", dim, dim);
    return {std::move(alg), Metric(std::move(g)), std::nullopt};
  }
  if (name == "wong") {
    WongSetup w = parse_wong_setup(preset, path);
    auto samples = sample_points(
        check.base_box.dim() == w.base_dim ? check.base_box
                                           : SampleBox::cube(w.base_dim, -0.9, 0.9),
        10, check.seed);
    try {
      return {wong_deformed(w, samples), wong_product_metric(w), std::move(w)};
    } catch (const ShapeError& e) {
      fail(path, e.what());
    }
  }
  fail(path + ".name", "unknown preset '" + name + "'");
}

}  // namespace

Model load_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  const bool has_explicit = doc.contains("rho") || doc.contains("sigma") || doc.contains("c");
  const bool has_preset = doc.contains("preset");
  if (has_explicit == has_preset)
    throw ConfigError(
        "config must give exactly one of explicit structure functions "
        "(rho, sigma, c) or a preset");

  // The check block is read first: presets that need probe points use its
  // box and seed.
  CheckSpec check;
  std::optional<json> check_doc;
  if (doc.contains("check")) check_doc = doc["check"];
  if (check_doc) {
    const json& cj = *check_doc;
    if (!cj.is_object()) throw ConfigError("check: expected an object");
    if (cj.contains("count")) check.count = static_cast<int>(as_count(cj["count"], "check.count"));
    if (cj.contains("seed")) {
      if (!cj["seed"].is_number_unsigned()) throw ConfigError("check.seed: expected an unsigned integer");
      check.seed = cj["seed"].get<std::uint64_t>();
    }
    if (cj.contains("tolerance")) {
      check.tolerance = as_number(cj["tolerance"], "check.tolerance");
      if (!(check.tolerance > 0)) throw ConfigError("check.tolerance: must be positive");
    }
    if (cj.contains("checks")) {
      if (!cj["checks"].is_array()) throw ConfigError("check.checks: expected an array");
      check.checks.clear();
      for (std::size_t i = 0; i < cj["checks"].size(); ++i) {
        const std::string name =
            as_string(cj["checks"][i], "check.checks[" + std::to_string(i) + "]");
        if (name != "skew" && name != "lie")
          throw ConfigError("check.checks: unknown check '" + name + "'");
        check.checks.push_back(name);
      }
    }
  }

  Algebroid algebroid = [&]() -> Algebroid {
    if (has_preset) {
      // Temporary box for preset expansion; re-read below once n is known.
      return expand_preset(doc["preset"], "preset", check).algebroid;
    }
    const std::size_t n = as_dim(field(doc, "config", "base_dim"), "base_dim");
    const std::size_t m = as_count(field(doc, "config", "fiber_rank"), "fiber_rank");
    ExprMat rho = as_expr_matrix(field(doc, "config", "rho"), "rho", n, m);
    ExprMat sigma = as_expr_matrix(field(doc, "config", "sigma"), "sigma", n, m);
    ExprCube c = as_expr_cube(field(doc, "config", "c"), "c", m);
    ChartNames chart;
    if (doc.contains("coordinates")) {
      const json& co = doc["coordinates"];
      if (!co.is_object()) throw ConfigError("coordinates: expected an object");
      auto names = [&](const char* key, std::size_t len) {
        std::vector<std::string> out;
        if (!co.contains(key)) return out;
        const json& arr = co[key];
        if (!arr.is_array() || arr.size() != len)
          throw ConfigError(std::string("coordinates.") + key + ": expected " +
                            std::to_string(len) + " names");
        for (const auto& v : arr) out.push_back(as_string(v, std::string("coordinates.") + key));
        return out;
      };
      chart.x = names("base", n);
      chart.y = names("fiber", m);
      chart.xi = names("dual", m);
      ChartNames std_names = ChartNames::standard(n, m);
      if (chart.x.empty()) chart.x = std_names.x;
      if (chart.y.empty()) chart.y = std_names.y;
      if (chart.xi.empty()) chart.xi = std_names.xi;
    }
    try {
      return Algebroid(n, m, std::move(rho), std::move(sigma), std::move(c),
                       std::move(chart));
    } catch (const ShapeError& e) {
      throw ConfigError(std::string("structure functions: ") + e.what());
    }
  }();

  const std::size_t n = algebroid.base_dim();
  const std::size_t m = algebroid.fiber_rank();

  if (doc.contains("base_dim") &&
      as_dim(doc["base_dim"], "base_dim") != n)
    throw ConfigError("base_dim: does not match the preset");
  if (doc.contains("fiber_rank") &&
      as_count(doc["fiber_rank"], "fiber_rank") != m)
    throw ConfigError("fiber_rank: does not match the preset");

  check.base_box = SampleBox::cube(n, -1.0, 1.0);
  check.fiber_box = SampleBox::cube(m, -1.0, 1.0);
  if (check_doc) {
    const json& cj = *check_doc;
    if (cj.contains("box")) check.base_box = as_box(cj["box"], "check.box", n);
    if (cj.contains("fiber_box"))
      check.fiber_box = as_box(cj["fiber_box"], "check.fiber_box", m);
  }

  Model model{std::move(algebroid)};
  model.check = check;

  if (has_preset) {
    PresetResult pre = expand_preset(doc["preset"], "preset", check);
    model.metric = std::move(pre.metric);
    model.wong = std::move(pre.wong);
    model.algebroid = std::move(pre.algebroid);
  }

  if (doc.contains("metric")) {
    ExprMat g = as_expr_matrix(doc["metric"], "metric", m, m);
    std::optional<ExprMat> ginv;
    if (doc.contains("metric_inverse"))
      ginv = as_expr_matrix(doc["metric_inverse"], "metric_inverse", m, m);
    try {
      model.metric = Metric(std::move(g), std::move(ginv));
    } catch (const ShapeError& e) {
      throw ConfigError(std::string("metric: ") + e.what());
    }
  } else if (doc.contains("metric_inverse")) {
    throw ConfigError("metric_inverse: requires 'metric'");
  }

  const ChartNames& chart = model.algebroid.chart();
  if (doc.contains("lagrangian")) {
    Expr L = parse_field_expr(doc["lagrangian"], "lagrangian");
    try {
      model.lagrangian = Lagrangian(L, chart);
    } catch (const ShapeError& e) {
      throw ConfigError(std::string("lagrangian: ") + e.what());
    }
  } else if (model.metric) {
    model.lagrangian = metric_lagrangian(*model.metric, chart);
  }
  if (doc.contains("hamiltonian")) {
    Expr H = parse_field_expr(doc["hamiltonian"], "hamiltonian");
    try {
      model.hamiltonian = Hamiltonian(H, chart);
    } catch (const ShapeError& e) {
      throw ConfigError(std::string("hamiltonian: ") + e.what());
    }
  } else if (model.metric) {
    model.hamiltonian = metric_hamiltonian(*model.metric, chart);
  }

  if (doc.contains("noether")) {
    const json& nj = doc["noether"];
    NoetherSpec spec{Section{}, Expr::number(0.0)};
    const json& sec = field(nj, "noether", "section");
    if (!sec.is_array() || sec.size() != m)
      throw ConfigError("noether.section: expected " + std::to_string(m) +
                        " coefficient expressions");
    for (std::size_t i = 0; i < m; ++i)
      spec.section.coeffs.push_back(
          parse_field_expr(sec[i], "noether.section[" + std::to_string(i) + "]"));
    if (nj.contains("f")) spec.f = parse_field_expr(nj["f"], "noether.f");
    for (const auto& e : spec.section.coeffs)
      for (const auto& v : e.variables())
        if (std::find(chart.x.begin(), chart.x.end(), v) == chart.x.end())
          throw ConfigError("noether.section: coefficient depends on non-base variable '" +
                            v + "'");
    if (!model.lagrangian)
      throw ConfigError("noether: requires a lagrangian (explicit or via metric)");
    model.noether = std::move(spec);
  }

  if (doc.contains("simulate")) {
    const json& sj = doc["simulate"];
    SimulateSpec spec;
    spec.t0 = as_number(field(sj, "simulate", "t0"), "simulate.t0");
    spec.t1 = as_number(field(sj, "simulate", "t1"), "simulate.t1");
    spec.h = as_number(field(sj, "simulate", "h"), "simulate.h");
    if (!(spec.h > 0)) throw ConfigError("simulate.h: must be positive");
    if (!(spec.t1 > spec.t0)) throw ConfigError("simulate.t1: must exceed t0");
    const json& init = field(sj, "simulate", "initial");
    spec.x0 = as_vector(field(init, "simulate.initial", "x"), "simulate.initial.x", n);
    const bool has_y = init.contains("y"), has_xi = init.contains("xi");
    if (has_y == has_xi)
      throw ConfigError("simulate.initial: give exactly one of 'y' or 'xi'");
    spec.phase = has_xi;
    spec.fiber0 = as_vector(init[has_y ? "y" : "xi"],
                            std::string("simulate.initial.") + (has_y ? "y" : "xi"), m);
    if (spec.phase) {
      if (!model.hamiltonian && !model.wong)
        throw ConfigError("simulate: phase-space run needs a hamiltonian");
    } else {
      if (!model.lagrangian && !model.wong)
        throw ConfigError("simulate: velocity-space run needs a lagrangian");
    }
    model.simulate = spec;
  }

  if (doc.contains("monitors")) {
    const json& ms = doc["monitors"];
    if (!ms.is_array()) throw ConfigError("monitors: expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string path = "monitors[" + std::to_string(i) + "]";
      const json& mj = ms[i];
      std::string name = as_string(field(mj, path, "name"), path + ".name");
      Expr e = parse_field_expr(field(mj, path, "expr"), path + ".expr");
      model.monitors.emplace_back(std::move(name), std::move(e));
    }
  }

  return model;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

}  // namespace algmech
