#include "pathlift/scene.hpp"

#include "pathlift/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pathlift {

namespace {

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
  throw ValidationError("scene: " + where + ": " + what);
}

void allow_keys(const SceneTree& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(where, "expected a section");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, v] : obj.items()) {
    if (!allowed.count(key)) invalid(where, "unknown key '" + key + "'");
  }
}

Expression expression(const SceneTree& v, const std::string& where) {
  if (v.is_number()) return Expression::constant(v.get<double>());
  if (v.is_string()) {
    try {
      return parse_expression(v.get<std::string>());
    } catch (const ParseError& e) {
      invalid(where, e.what());
    }
  }
  invalid(where, "expected a number or an expression string");
}

Expression constant_expression(const SceneTree& v, const std::string& where) {
  Expression e = expression(v, where);
  if (!e.is_constant()) invalid(where, "must be a constant (no variables)");
  (void)e.evaluate();
  return e;
}

void check_vars(const Expression& e, const std::string& where, bool allow_s, int max_x, int max_v) {
  if (e.uses_param() && !allow_s) invalid(where, "may not depend on s");
  if (e.max_coord_index() > max_x) {
    invalid(where, max_x == 0 ? "may not use coordinates" : "uses x" + std::to_string(e.max_coord_index()) +
                                                                 " beyond dimension " + std::to_string(max_x));
  }
  if (e.max_velocity_index() > max_v) {
    invalid(where, max_v == 0 ? "may not use velocity components" : "uses v" + std::to_string(e.max_velocity_index()) +
                                                                        " beyond dimension " + std::to_string(max_v));
  }
}

std::vector<Expression> expression_list(const SceneTree& v, const std::string& where, std::size_t size) {
  if (!v.is_array()) invalid(where, "expected an array");
  if (v.size() != size) {
    invalid(where, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<Expression> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expression(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ExprMatrix expression_matrix(const SceneTree& v, const std::string& where, int dim) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
    invalid(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  }
  ExprMatrix m;
  for (std::size_t i = 0; i < v.size(); ++i) {
    m.push_back(expression_list(v[i], where + "[" + std::to_string(i) + "]", static_cast<std::size_t>(dim)));
  }
  return m;
}

double number(const SceneTree& v, const std::string& where) {
  if (!v.is_number()) invalid(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(where, "must be finite");
  return d;
}

std::string text(const SceneTree& v, const std::string& where) {
  if (!v.is_string()) invalid(where, "expected a string");
  return v.get<std::string>();
}

SceneTree expr_value(const Expression& e) {
  if (e.root().kind == Expression::Kind::Literal) return e.root().value;
  return e.to_string();
}

SceneTree expr_list_value(const std::vector<Expression>& list) {
  SceneTree arr = SceneTree::array();
  for (const auto& e : list) arr.push_back(e.to_string());
  return arr;
}

SceneTree expr_matrix_value(const ExprMatrix& m) {
  SceneTree arr = SceneTree::array();
  for (const auto& row : m) arr.push_back(expr_list_value(row));
  return arr;
}

SceneTree constant_list_value(const std::vector<Expression>& list) {
  SceneTree arr = SceneTree::array();
  for (const auto& e : list) arr.push_back(expr_value(e));
  return arr;
}

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

void flatten(const SceneTree& v, int depth, int dim, std::vector<double>& out, const std::string& where) {
  if (depth == 0) {
    out.push_back(number(v, where));
    return;
  }
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
    invalid(where, "tensor literal must nest arrays of length " + std::to_string(dim));
  }
  for (const auto& e : v) flatten(e, depth - 1, dim, out, where);
}

SceneTree nest(const std::vector<double>& c, std::size_t& at, int depth, int dim) {
  if (depth == 0) return c[at++];
  SceneTree arr = SceneTree::array();
  for (int i = 0; i < dim; ++i) arr.push_back(nest(c, at, depth - 1, dim));
  return arr;
}

}  // namespace

std::vector<double> flatten_tensor_literal(const SceneTree& value, int p, int q, int dim) {
  std::vector<double> out;
  flatten(value, p + q, dim, out, "task.tensor.components");
  return out;
}

SceneTree nest_tensor_components(const std::vector<double>& components, int rank, int dim) {
  if (components.size() != ipow(dim, rank)) throw ValidationError("tensor component count does not match its type");
  std::size_t at = 0;
  return nest(components, at, rank, dim);
}

Scene scene_from_tree(const SceneTree& tree) {
  allow_keys(tree, "document", {"chart", "path", "transport", "task", "integrator", "tolerances", "output"});
  Scene scene;

  // chart
  if (!tree.contains("chart")) invalid("document", "missing 'chart' section");
  const auto& chart = tree["chart"];
  allow_keys(chart, "chart", {"dim", "name", "bounds", "periods"});
  if (!chart.contains("dim") || !chart["dim"].is_number_integer()) invalid("chart", "'dim' must be an integer");
  scene.chart.dim = chart["dim"].get<int>();
  const int dim = scene.chart.dim;
  if (dim < 1 || dim > 8) invalid("chart", "'dim' must be between 1 and 8");
  scene.chart.name = chart.contains("name") ? text(chart["name"], "chart.name") : "chart";
  scene.chart.bounds.resize(static_cast<std::size_t>(dim));
  if (chart.contains("bounds")) {
    const auto& b = chart["bounds"];
    if (!b.is_array() || b.size() != static_cast<std::size_t>(dim)) invalid("chart.bounds", "expected one entry per axis");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string where = "chart.bounds[" + std::to_string(i) + "]";
      if (b[i].is_null()) continue;
      if (!b[i].is_array() || b[i].size() != 2) invalid(where, "expected [lo, hi] or null");
      auto lo = constant_expression(b[i][0], where);
      auto hi = constant_expression(b[i][1], where);
      if (!(lo.evaluate() < hi.evaluate())) invalid(where, "empty interval");
      scene.chart.bounds[i] = std::pair{lo, hi};
    }
  }
  scene.chart.periods.resize(static_cast<std::size_t>(dim));
  if (chart.contains("periods")) {
    const auto& p = chart["periods"];
    if (!p.is_array() || p.size() != static_cast<std::size_t>(dim)) invalid("chart.periods", "expected one entry per axis");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string where = "chart.periods[" + std::to_string(i) + "]";
      if (p[i].is_null()) continue;
      auto period = constant_expression(p[i], where);
      if (!(period.evaluate() > 0.0)) invalid(where, "period must be positive");
      scene.chart.periods[i] = period;
    }
  }

  // path
  if (tree.contains("path")) {
    const auto& p = tree["path"];
    allow_keys(p, "path", {"domain", "position", "velocity"});
    if (!p.contains("domain") || !p["domain"].is_array() || p["domain"].size() != 2) {
      invalid("path", "'domain' must be [lo, hi]");
    }
    PathSpec spec{constant_expression(p["domain"][0], "path.domain"),
                  constant_expression(p["domain"][1], "path.domain"), {}, {}};
    if (!(spec.lo.evaluate() < spec.hi.evaluate())) invalid("path.domain", "empty interval");
    if (p.contains("position")) {
      spec.position = expression_list(p["position"], "path.position", static_cast<std::size_t>(dim));
      for (const auto& e : spec.position) check_vars(e, "path.position", true, 0, 0);
    }
    if (p.contains("velocity")) {
      if (spec.position.empty()) invalid("path", "'velocity' given without 'position'");
      spec.velocity = expression_list(p["velocity"], "path.velocity", static_cast<std::size_t>(dim));
      for (const auto& e : spec.velocity) check_vars(e, "path.velocity", true, 0, 0);
    }
    scene.path = std::move(spec);
  }

  // transport
  if (tree.contains("transport")) {
    const auto& t = tree["transport"];
    allow_keys(t, "transport", {"kind", "generator", "derivative", "coefficients", "connection", "christoffel", "mode",
                                "covector_generator", "scalar_f"});
    TransportSpec spec;
    const std::string kind = t.contains("kind") ? text(t["kind"], "transport.kind") : "";
    auto check_matrix = [&](const ExprMatrix& m, const std::string& where, bool s, int x, int v) {
      for (const auto& row : m)
        for (const auto& e : row) check_vars(e, where, s, x, v);
    };
    if (kind == "generator") {
      spec.kind = TransportKind::Generator;
      if (!t.contains("generator")) invalid("transport", "kind 'generator' needs 'generator'");
      spec.generator = expression_matrix(t["generator"], "transport.generator", dim);
      check_matrix(spec.generator, "transport.generator", true, 0, 0);
      if (t.contains("derivative")) {
        spec.derivative = expression_matrix(t["derivative"], "transport.derivative", dim);
        check_matrix(spec.derivative, "transport.derivative", true, 0, 0);
      }
    } else if (kind == "coefficients") {
      spec.kind = TransportKind::Coefficients;
      if (!t.contains("coefficients")) invalid("transport", "kind 'coefficients' needs 'coefficients'");
      spec.coefficients = expression_matrix(t["coefficients"], "transport.coefficients", dim);
      check_matrix(spec.coefficients, "transport.coefficients", true, dim, dim);
    } else if (kind == "connection") {
      spec.kind = TransportKind::Connection;
      spec.connection = t.contains("connection") ? text(t["connection"], "transport.connection") : "";
      if (spec.connection == "sphere") {
        if (dim != 2) invalid("transport.connection", "the sphere preset needs a 2-dimensional chart");
      } else if (spec.connection == "custom") {
        if (!t.contains("christoffel") || !t["christoffel"].is_array() ||
            t["christoffel"].size() != static_cast<std::size_t>(dim)) {
          invalid("transport.christoffel", "expected " + std::to_string(dim) + " matrices, one per upper index");
        }
        for (std::size_t i = 0; i < t["christoffel"].size(); ++i) {
          const std::string where = "transport.christoffel[" + std::to_string(i) + "]";
          spec.christoffel.push_back(expression_matrix(t["christoffel"][i], where, dim));
          check_matrix(spec.christoffel.back(), where, false, dim, 0);
        }
      } else if (spec.connection != "flat") {
        invalid("transport.connection", "expected 'flat', 'sphere' or 'custom'");
      }
    } else {
      invalid("transport.kind", "expected 'generator', 'coefficients' or 'connection'");
    }
    const std::pair<const char*, const char*> owners[] = {{"derivative", "generator"},
                                                          {"coefficients", "coefficients"},
                                                          {"connection", "connection"},
                                                          {"christoffel", "connection"}};
    for (const auto& [key, owner] : owners) {
      if (t.contains(key) && kind != owner) {
        invalid("transport", std::string("'") + key + "' needs kind '" + owner + "'");
      }
    }
    const std::string mode = t.contains("mode") ? text(t["mode"], "transport.mode") : "full";
    if (mode == "full") {
      spec.full_consistency = true;
      if (t.contains("covector_generator") || t.contains("scalar_f")) {
        invalid("transport", "'covector_generator' and 'scalar_f' need mode 'tensor-product-only'");
      }
    } else if (mode == "tensor-product-only") {
      spec.full_consistency = false;
      if (t.contains("covector_generator")) {
        spec.covector_generator = expression_matrix(t["covector_generator"], "transport.covector_generator", dim);
        check_matrix(spec.covector_generator, "transport.covector_generator", true, 0, 0);
      }
      if (t.contains("scalar_f")) {
        spec.scalar_f = expression(t["scalar_f"], "transport.scalar_f");
        check_vars(*spec.scalar_f, "transport.scalar_f", true, 0, 0);
      }
    } else {
      invalid("transport.mode", "expected 'full' or 'tensor-product-only'");
    }
    scene.transport = std::move(spec);
  }

  // task
  if (tree.contains("task")) {
    const auto& t = tree["task"];
    allow_keys(t, "task", {"s0", "t", "vector", "x0", "velocity0", "tensor", "grid"});
    if (t.contains("s0")) scene.task.s0 = constant_expression(t["s0"], "task.s0");
    if (t.contains("t")) scene.task.t = constant_expression(t["t"], "task.t");
    auto const_list = [&](const char* key) {
      std::vector<Expression> out = expression_list(t[key], std::string("task.") + key, static_cast<std::size_t>(dim));
      for (const auto& e : out) {
        if (!e.is_constant()) invalid(std::string("task.") + key, "entries must be constants");
      }
      return out;
    };
    if (t.contains("vector")) scene.task.vector = const_list("vector");
    if (t.contains("x0")) scene.task.x0 = const_list("x0");
    if (t.contains("velocity0")) scene.task.velocity0 = const_list("velocity0");
    if (t.contains("grid")) {
      if (!t["grid"].is_number_integer() || t["grid"].get<int>() < 2) invalid("task.grid", "expected an integer >= 2");
      scene.task.grid = t["grid"].get<int>();
    }
    if (t.contains("tensor")) {
      const auto& tt = t["tensor"];
      allow_keys(tt, "task.tensor", {"p", "q", "components"});
      TensorLiteral lit;
      if (!tt.contains("p") || !tt["p"].is_number_integer() || !tt.contains("q") || !tt["q"].is_number_integer()) {
        invalid("task.tensor", "'p' and 'q' must be integers");
      }
      lit.p = tt["p"].get<int>();
      lit.q = tt["q"].get<int>();
      if (lit.p < 0 || lit.q < 0 || lit.p + lit.q > 6) invalid("task.tensor", "ranks must satisfy 0 <= p + q <= 6");
      if (!tt.contains("components")) invalid("task.tensor", "missing 'components'");
      lit.components = flatten_tensor_literal(tt["components"], lit.p, lit.q, dim);
      scene.task.tensor = std::move(lit);
    }
  }

  if (tree.contains("integrator")) {
    const auto& in = tree["integrator"];
    allow_keys(in, "integrator", {"step"});
    if (in.contains("step")) {
      const double h = number(in["step"], "integrator.step");
      if (!(h > 0.0)) invalid("integrator.step", "must be positive");
      scene.step = h;
    }
  }

  if (tree.contains("tolerances")) {
    const auto& tol = tree["tolerances"];
    if (!tol.is_object()) invalid("tolerances", "expected a section");
    for (const auto& [key, v] : tol.items()) {
      const double x = number(v, "tolerances." + key);
      if (!(x > 0.0)) invalid("tolerances." + key, "must be positive");
      scene.tolerances[key] = x;
    }
  }

  if (tree.contains("output")) {
    const auto& o = tree["output"];
    allow_keys(o, "output", {"format", "destination"});
    if (o.contains("format")) {
      scene.output.format = text(o["format"], "output.format");
      if (*scene.output.format != "csv" && *scene.output.format != "json") {
        invalid("output.format", "expected 'csv' or 'json'");
      }
    }
    if (o.contains("destination")) scene.output.destination = text(o["destination"], "output.destination");
  }
  return scene;
}

SceneTree scene_to_tree(const Scene& scene) {
  SceneTree tree = SceneTree::object();
  SceneTree chart = SceneTree::object();
  chart["dim"] = scene.chart.dim;
  chart["name"] = scene.chart.name;
  bool any_bound = false;
  for (const auto& b : scene.chart.bounds) any_bound = any_bound || b.has_value();
  if (any_bound) {
    SceneTree bounds = SceneTree::array();
    for (const auto& b : scene.chart.bounds) {
      if (!b) {
        bounds.push_back(nullptr);
      } else {
        bounds.push_back(SceneTree::array({expr_value(b->first), expr_value(b->second)}));
      }
    }
    chart["bounds"] = std::move(bounds);
  }
  if (std::any_of(scene.chart.periods.begin(), scene.chart.periods.end(), [](const auto& p) { return p.has_value(); })) {
    SceneTree periods = SceneTree::array();
    for (const auto& p : scene.chart.periods) {
      if (p) {
        periods.push_back(expr_value(*p));
      } else {
        periods.push_back(nullptr);
      }
    }
    chart["periods"] = std::move(periods);
  }
  tree["chart"] = std::move(chart);

  if (scene.path) {
    SceneTree p = SceneTree::object();
    p["domain"] = SceneTree::array({expr_value(scene.path->lo), expr_value(scene.path->hi)});
    if (!scene.path->position.empty()) p["position"] = expr_list_value(scene.path->position);
    if (!scene.path->velocity.empty()) p["velocity"] = expr_list_value(scene.path->velocity);
    tree["path"] = std::move(p);
  }

  if (scene.transport) {
    const auto& t = *scene.transport;
    SceneTree out = SceneTree::object();
    switch (t.kind) {
      case TransportKind::Generator:
        out["kind"] = "generator";
        out["generator"] = expr_matrix_value(t.generator);
        if (!t.derivative.empty()) out["derivative"] = expr_matrix_value(t.derivative);
        break;
      case TransportKind::Coefficients:
        out["kind"] = "coefficients";
        out["coefficients"] = expr_matrix_value(t.coefficients);
        break;
      case TransportKind::Connection:
        out["kind"] = "connection";
        out["connection"] = t.connection;
        if (!t.christoffel.empty()) {
          SceneTree c = SceneTree::array();
          for (const auto& m : t.christoffel) c.push_back(expr_matrix_value(m));
          out["christoffel"] = std::move(c);
        }
        break;
    }
    if (!t.full_consistency) {
      out["mode"] = "tensor-product-only";
      if (!t.covector_generator.empty()) out["covector_generator"] = expr_matrix_value(t.covector_generator);
      if (t.scalar_f) out["scalar_f"] = t.scalar_f->to_string();
    }
    tree["transport"] = std::move(out);
  }

  SceneTree task = SceneTree::object();
  if (scene.task.s0) task["s0"] = expr_value(*scene.task.s0);
  if (scene.task.t) task["t"] = expr_value(*scene.task.t);
  if (!scene.task.vector.empty()) task["vector"] = constant_list_value(scene.task.vector);
  if (!scene.task.x0.empty()) task["x0"] = constant_list_value(scene.task.x0);
  if (!scene.task.velocity0.empty()) task["velocity0"] = constant_list_value(scene.task.velocity0);
  if (scene.task.grid) task["grid"] = *scene.task.grid;
  if (scene.task.tensor) {
    const auto& lit = *scene.task.tensor;
    SceneTree tt = SceneTree::object();
    tt["p"] = lit.p;
    tt["q"] = lit.q;
    tt["components"] = nest_tensor_components(lit.components, lit.p + lit.q, scene.chart.dim);
    task["tensor"] = std::move(tt);
  }
  if (!task.empty()) tree["task"] = std::move(task);

  if (scene.step) tree["integrator"] = SceneTree::object({{"step", *scene.step}});
  if (!scene.tolerances.empty()) {
    SceneTree tol = SceneTree::object();
    for (const auto& [k, v] : scene.tolerances) tol[k] = v;
    tree["tolerances"] = std::move(tol);
  }
  SceneTree out = SceneTree::object();
  if (scene.output.format) out["format"] = *scene.output.format;
  if (scene.output.destination) out["destination"] = *scene.output.destination;
  if (!out.empty()) tree["output"] = std::move(out);
  return tree;
}

Scene parse_scene(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '{') {
    SceneTree tree;
    try {
      tree = SceneTree::parse(text);
    } catch (const SceneTree::parse_error& e) {
      throw ParseError(std::string("scene: invalid JSON: ") + e.what(), e.byte);
    }
    return scene_from_tree(tree);
  }
  return scene_from_tree(parse_scene_text(text));
}

std::string serialize_scene(const Scene& scene, SceneEncoding encoding) {
  const SceneTree tree = scene_to_tree(scene);
  if (encoding == SceneEncoding::Json) return tree.dump(2) + "\n";
  return format_scene_text(tree);
}

}  // namespace pathlift
