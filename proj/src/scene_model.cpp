#include "pathlift/scene_model.hpp"

#include "pathlift/errors.hpp"

#include <cmath>
#include <numbers>

namespace pathlift {

namespace {

Chart make_chart(const ChartSpec& spec) {
  std::vector<std::optional<Interval>> bounds;
  for (const auto& b : spec.bounds) {
    if (b) {
      bounds.push_back(Interval{b->first.evaluate(), b->second.evaluate()});
    } else {
      bounds.push_back(std::nullopt);
    }
  }
  std::vector<std::optional<double>> periods;
  for (const auto& p : spec.periods) {
    periods.push_back(p ? std::optional<double>(p->evaluate()) : std::nullopt);
  }
  return Chart(spec.dim, spec.name, std::move(bounds), std::move(periods));
}

std::vector<double> as_std(const Vector* v) {
  if (!v) return {};
  return {v->data(), v->data() + v->size()};
}

Vector constants(const std::vector<Expression>& list, const char* what) {
  if (list.empty()) throw ValidationError(std::string("scene: task.") + what + " is required by this command");
  Vector out(static_cast<Eigen::Index>(list.size()));
  for (std::size_t i = 0; i < list.size(); ++i) out[static_cast<Eigen::Index>(i)] = list[i].evaluate();
  return out;
}

Matrix eval_matrix(const ExprMatrix& m, double s, const Vector* x = nullptr, const Vector* v = nullptr) {
  const auto xs = as_std(x);
  const auto vs = as_std(v);
  const Bindings b{s, xs, vs};
  const auto n = static_cast<Eigen::Index>(m.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(b);
    }
  return out;
}

}  // namespace

SceneModel::SceneModel(Scene scene, std::optional<double> step_override)
    : scene_(std::move(scene)), chart_(make_chart(scene_.chart)) {
  if (step_override) {
    steps_.step = *step_override;
  } else if (scene_.step) {
    steps_.step = *scene_.step;
  }
  if (!(steps_.step > 0.0) || !std::isfinite(steps_.step)) throw ValidationError("integrator step must be positive");
  if (scene_.path && !scene_.path->position.empty()) {
    path_ = make_path(chart_, domain(), scene_.path->position, scene_.path->velocity);
  }
}

Interval SceneModel::domain() const {
  if (!scene_.path) throw ValidationError("scene: this command needs a 'path' section with a domain");
  return {scene_.path->lo.evaluate(), scene_.path->hi.evaluate()};
}

bool SceneModel::has_path() const { return path_.has_value(); }

const PathCurve& SceneModel::path() const {
  if (!path_) throw ValidationError("scene: this command needs 'path.position'");
  return *path_;
}

const TransportSpec& SceneModel::transport_spec() const {
  if (!scene_.transport) throw ValidationError("scene: this command needs a 'transport' section");
  return *scene_.transport;
}

ConnectionField SceneModel::connection() const {
  const auto& t = transport_spec();
  if (t.kind != TransportKind::Connection) throw ValidationError("scene: transport kind is not 'connection'");
  const int n = dim();
  if (t.connection == "flat") {
    return ConnectionField(chart_, [n](const Vector&) { return Christoffel(n); }, "flat");
  }
  if (t.connection == "sphere") {
    const auto sphere = ConnectionField::unit_sphere();
    return ConnectionField(chart_, [sphere](const Vector& x) { return sphere.coefficients(x); }, "sphere");
  }
  const auto table = t.christoffel;
  return ConnectionField(
      chart_,
      [table, n](const Vector& x) {
        const std::vector<double> xs(x.data(), x.data() + x.size());
        Christoffel g(n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              g(i, j, k) = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]
                               .evaluate({0.0, xs, {}});
            }
        return g;
      },
      "custom");
}

CoefficientField SceneModel::coefficients() const {
  const auto& t = transport_spec();
  switch (t.kind) {
    case TransportKind::Generator:
      return coefficients_field_from_generator(generator());
    case TransportKind::Connection:
      return parallel_transport_coefficients(connection(), path());
    case TransportKind::Coefficients: {
      const PathCurve p = path();
      return CoefficientField(p, [m = t.coefficients, p](double s) {
        const Vector x = p.position(s);
        const Vector v = p.velocity(s);
        return eval_matrix(m, s, &x, &v);
      });
    }
  }
  throw ValidationError("scene: unknown transport kind");
}

TransportMatrixFamily SceneModel::family() const {
  if (kind() == TransportKind::Generator) return family_from_generator(generator());
  return family_from_coefficients(coefficients(), steps_);
}

TransportGenerator SceneModel::generator() const {
  const auto& t = transport_spec();
  if (t.kind != TransportKind::Generator) return generator_from_family(family(), domain().lo);
  std::optional<MatrixFn> df;
  if (!t.derivative.empty()) df = [m = t.derivative](double s) { return eval_matrix(m, s); };
  return TransportGenerator(path(), [m = t.generator](double s) { return eval_matrix(m, s); }, df);
}

TensorTransportRule SceneModel::tensor_rule() const {
  const auto& t = transport_spec();
  const auto fam = family();
  if (t.full_consistency) return TensorTransportRule::full(fam);
  TwoPointMatrixFn covector;
  if (!t.covector_generator.empty()) {
    covector = [g = t.covector_generator](double tt, double s) {
      return Matrix(checked_solve(eval_matrix(g, tt), eval_matrix(g, s), kGeneratorConditionCap, "covector generator"));
    };
  } else {
    covector = [fam](double tt, double s) {
      return Matrix(checked_inverse(fam(tt, s), kGeneratorConditionCap, "transport matrix").transpose());
    };
  }
  TensorTransportRule::ScalarFn f = [](double) { return 1.0; };
  if (t.scalar_f) {
    const Expression e = *t.scalar_f;
    f = [e](double s) { return e.evaluate({.s = s}); };
  }
  return TensorTransportRule::tensor_product_only(dim(), [fam](double tt, double s) { return fam(tt, s); },
                                                  std::move(covector), std::move(f));
}

CoefficientProvider SceneModel::provider() const {
  const auto& t = transport_spec();
  switch (t.kind) {
    case TransportKind::Connection:
      return geodesic_provider(connection());
    case TransportKind::Coefficients:
      return [m = t.coefficients](double s, const Vector& x, const Vector& v) { return eval_matrix(m, s, &x, &v); };
    case TransportKind::Generator:
      return [g = t.generator, dg = t.derivative](double s, const Vector&, const Vector&) {
        const Matrix f = eval_matrix(g, s);
        Matrix df;
        if (!dg.empty()) {
          df = eval_matrix(dg, s);
        } else {
          constexpr double h = TransportGenerator::kFiniteDifferenceStep;
          df = (eval_matrix(g, s + h) - eval_matrix(g, s - h)) / (2 * h);
        }
        return Matrix(checked_solve(f, df, kGeneratorConditionCap, "generator"));
      };
  }
  throw ValidationError("scene: unknown transport kind");
}

double SceneModel::s0() const {
  return scene_.task.s0 ? scene_.task.s0->evaluate() : domain().lo;
}

double SceneModel::t() const {
  if (!scene_.task.t) throw ValidationError("scene: task.t is required by this command");
  return scene_.task.t->evaluate();
}

Vector SceneModel::vector() const { return constants(scene_.task.vector, "vector"); }
Vector SceneModel::x0() const { return constants(scene_.task.x0, "x0"); }
Vector SceneModel::velocity0() const { return constants(scene_.task.velocity0, "velocity0"); }

TensorComponents SceneModel::tensor(double anchor) const {
  if (scene_.task.tensor) {
    const auto& lit = *scene_.task.tensor;
    return TensorComponents(lit.p, lit.q, dim(), anchor, lit.components);
  }
  const Vector v = vector();
  return TensorComponents(1, 0, dim(), anchor, std::vector<double>(v.data(), v.data() + v.size()));
}

int SceneModel::grid(int fallback) const { return scene_.task.grid.value_or(fallback); }

}  // namespace pathlift
