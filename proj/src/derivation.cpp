#include "pathlift/derivation.hpp"

#include "pathlift/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pathlift {

namespace {

template <class F>
auto centered(const F& f, const Interval& d, double s, double h) {
  if (s - h >= d.lo && s + h <= d.hi) return decltype(f(s))((f(s + h) - f(s - h)) / (2 * h));
  if (s - h < d.lo) return decltype(f(s))((-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2 * h)) / (2 * h));
  return decltype(f(s))((3.0 * f(s) - 4.0 * f(s - h) + f(s - 2 * h)) / (2 * h));
}

void require_same_path(const PathCurve& a, const PathCurve& b, const char* what) {
  if (!a.same_path(b) && a.domain() != b.domain()) {
    throw ValidationError(std::string(what) + ": section and transport live on different paths");
  }
}

}  // namespace

SectionAlongPath::SectionAlongPath(PathCurve path, VectorFn components, std::optional<VectorFn> derivative, bool c1)
    : path_(std::move(path)),
      components_(std::move(components)),
      derivative_(derivative && *derivative ? std::move(derivative) : std::nullopt),
      c1_(c1) {
  if (!components_) throw ValidationError("section component function is empty");
}

Vector SectionAlongPath::value(double s) const {
  if (!path_.domain().contains(s, 1e-12 * std::max(1.0, path_.domain().length()))) {
    throw ValidationError("section evaluated outside the path domain");
  }
  Vector v = components_(s);
  if (v.size() != path_.chart().dim()) throw ValidationError("section has wrong number of components");
  if (!v.allFinite()) throw NumericalError("section is not finite at s = " + std::to_string(s));
  return v;
}

Vector SectionAlongPath::derivative(double s) const {
  if (!c1_) throw ValidationError("section is not C1; its derivative is undefined");
  if (derivative_) return (*derivative_)(s);
  return centered([this](double u) { return value(u); }, path_.domain(), s, kFiniteDifferenceStep);
}

double ScalarFunction::derivative_at(double s) const {
  if (derivative) return derivative(s);
  constexpr double h = 1e-6;
  return (value(s + h) - value(s - h)) / (2 * h);
}

DerivationResult derivation_apply(const CoefficientField& coef, const SectionAlongPath& sigma) {
  if (!sigma.is_c1()) throw ValidationError("derivation_apply: section is not C1");
  require_same_path(coef.path(), sigma.path(), "derivation_apply");
  return {sigma.path(), [coef, sigma](double s) { return Vector(sigma.derivative(s) + coef(s) * sigma.value(s)); }};
}

LimitCheckReport derivation_limit_check(const TransportMatrixFamily& h, const SectionAlongPath& sigma, double s,
                                        const Vector& reference, const std::vector<double>& eps) {
  if (!sigma.is_c1()) throw ValidationError("derivation_limit_check: section is not C1");
  LimitCheckReport report;
  const Vector base = sigma.value(s);
  for (double e : eps) {
    double step = e;
    if (s + step > h.path().domain().hi) step = -e;
    const Vector q = (h(s, s + step) * sigma.value(s + step) - base) / step;
    report.eps.push_back(e);
    report.quotients.push_back(q);
    report.deviations.push_back(max_abs(q - reference));
  }
  std::vector<double> slopes;
  for (std::size_t i = 1; i < report.eps.size(); ++i) {
    const double d0 = report.deviations[i - 1];
    const double d1 = report.deviations[i];
    if (d0 > 0.0 && d1 > 0.0) slopes.push_back(std::log(d0 / d1) / std::log(report.eps[i - 1] / report.eps[i]));
  }
  if (!slopes.empty()) {
    report.order = std::accumulate(slopes.begin(), slopes.end(), 0.0) / static_cast<double>(slopes.size());
  }
  return report;
}

LimitCheckReport derivation_limit_check(const TransportMatrixFamily& h, const CoefficientField& coef,
                                        const SectionAlongPath& sigma, double s, const std::vector<double>& eps) {
  return derivation_limit_check(h, sigma, s, derivation_apply(coef, sigma)(s), eps);
}

SectionAlongPath transported_section(const TransportMatrixFamily& h, double s0, const Vector& u) {
  if (u.size() != h.rank()) throw ValidationError("vector dimension does not match transport rank");
  return SectionAlongPath(h.path(), [h, s0, u](double t) { return Vector(h(t, s0) * u); });
}

double leibniz_check(const CoefficientField& coef, const ScalarFunction& f, const SectionAlongPath& sigma,
                     int samples) {
  if (!f.value) throw ValidationError("leibniz_check: scalar function is empty");
  const SectionAlongPath product(
      sigma.path(), [f, sigma](double s) { return Vector(f.value(s) * sigma.value(s)); },
      [f, sigma](double s) { return Vector(f.derivative_at(s) * sigma.value(s) + f.value(s) * sigma.derivative(s)); });
  const auto d_product = derivation_apply(coef, product);
  const auto d_sigma = derivation_apply(coef, sigma);
  const auto& dom = sigma.path().domain();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = dom.lo + dom.length() * i / std::max(1, samples - 1);
    const Vector rhs = f.derivative_at(s) * sigma.value(s) + f.value(s) * d_sigma(s);
    worst = std::max(worst, max_abs(d_product(s) - rhs));
  }
  return worst;
}

TransportedSection solve_transport_equation(const CoefficientField& coef, const Vector& sigma0, double s0,
                                            const std::vector<double>& grid, StepConfig steps) {
  const auto& dom = coef.path().domain();
  if (!dom.contains(s0)) throw ValidationError("solve_transport_equation: s0 outside the path domain");
  if (sigma0.size() != coef.rank()) throw ValidationError("initial value has wrong dimension");
  auto rhs = [&coef](double u, const Vector& y) -> Vector { return -coef(u) * y; };

  std::vector<Vector> values(grid.size());

  // March outward from s0 in both directions, visiting grid points in order.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&grid](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  Vector y = sigma0;
  double at = s0;
  for (std::size_t k : order) {
    if (grid[k] < s0) continue;
    if (!dom.contains(grid[k])) throw ValidationError("output grid point outside the path domain");
    y = rk4_integrate(rhs, y, at, grid[k], steps.step);
    at = grid[k];
    values[k] = y;
  }
  y = sigma0;
  at = s0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (grid[*it] >= s0) continue;
    if (!dom.contains(grid[*it])) throw ValidationError("output grid point outside the path domain");
    y = rk4_integrate(rhs, y, at, grid[*it], steps.step);
    at = grid[*it];
    values[*it] = y;
  }
  for (const auto& v : values) {
    if (!v.allFinite()) throw NumericalError("transport equation solution is not finite");
  }
  // The section's derivative follows from the equation itself.
  SectionAlongPath section(
      coef.path(),
      [coef, sigma0, s0, steps](double s) {
        auto f = [&coef](double u, const Vector& z) -> Vector { return -coef(u) * z; };
        return rk4_integrate(f, Vector(sigma0), s0, s, steps.step);
      },
      [coef, sigma0, s0, steps](double s) {
        auto f = [&coef](double u, const Vector& z) -> Vector { return -coef(u) * z; };
        return Vector(-coef(s) * rk4_integrate(f, Vector(sigma0), s0, s, steps.step));
      });
  return {std::move(section), grid, std::move(values)};
}

LTransportReport is_l_transported(const TransportMatrixFamily& h, const SectionAlongPath& sigma, double tolerance,
                                  int samples) {
  const auto& dom = sigma.path().domain();
  std::vector<double> params;
  std::vector<Vector> values;
  for (int i = 0; i < samples; ++i) {
    params.push_back(dom.lo + dom.length() * i / std::max(1, samples - 1));
    values.push_back(sigma.value(params.back()));
  }
  LTransportReport report;
  for (std::size_t a = 0; a < params.size(); ++a) {
    for (std::size_t b = 0; b < params.size(); ++b) {
      if (a == b) continue;
      const Vector moved = h(params[b], params[a]) * values[a];
      report.max_deviation = std::max(report.max_deviation, max_abs(values[b] - moved));
    }
  }
  report.transported = report.max_deviation <= tolerance;
  return report;
}

LTransportReport is_l_transported_scalar(const TensorTransportRule& rule, const Interval& domain,
                                         const std::function<double(double)>& sigma, double tolerance, int samples) {
  LTransportReport report;
  for (int a = 0; a < samples; ++a) {
    for (int b = 0; b < samples; ++b) {
      const double s = domain.lo + domain.length() * a / std::max(1, samples - 1);
      const double t = domain.lo + domain.length() * b / std::max(1, samples - 1);
      report.max_deviation = std::max(report.max_deviation, std::abs(sigma(t) - scalar_transport(rule, t, s, sigma(s))));
    }
  }
  report.transported = report.max_deviation <= tolerance;
  return report;
}

MatrixFn covariant_decomposition(const CoefficientField& coef, const ConnectionField& conn) {
  if (conn.chart().dim() != coef.rank()) throw ValidationError("connection and transport have different dimensions");
  const PathCurve path = coef.path();
  return [coef, conn, path](double s) {
    const Matrix along = conn.coefficients(path.position(s)).contract_velocity(path.velocity(s));
    return Matrix(coef(s) - along);
  };
}

DerivationResult covariant_derivative_along(const ConnectionField& conn, const SectionAlongPath& sigma) {
  const PathCurve path = sigma.path();
  return {path, [conn, sigma, path](double s) {
            const Christoffel g = conn.coefficients(path.position(s));
            const Vector v = path.velocity(s);
            const Vector x = sigma.value(s);
            Vector out = sigma.derivative(s);
            const int n = g.dim();
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out[i] += g(i, j, k) * x[j] * v[k];
            return out;
          }};
}

DerivationResult reconstructed_derivation(const ConnectionField& conn, const MatrixFn& hv,
                                          const SectionAlongPath& sigma) {
  const auto nabla = covariant_derivative_along(conn, sigma);
  return {sigma.path(), [nabla, hv, sigma](double s) { return Vector(nabla(s) + hv(s) * sigma.value(s)); }};
}

TensorCoefficients tensor_coefficients(const Matrix& gamma) {
  return {gamma, -gamma.transpose(), 0.0};
}

TensorCoefficients tensor_coefficients(const TensorTransportRule& rule, double s, double h) {
  TensorCoefficients c;
  c.vector = (rule.vector_matrix(s, s + h) - rule.vector_matrix(s, s - h)) / (2 * h);
  c.covector = (rule.covector_matrix(s, s + h) - rule.covector_matrix(s, s - h)) / (2 * h);
  c.scalar = rule.mode() == ConsistencyMode::TensorProductOnly
                 ? (rule.scalar_factor(s, s + h) - rule.scalar_factor(s, s - h)) / (2 * h)
                 : 0.0;
  return c;
}

TensorComponents TensorSection::derivative_at(double s, double h) const {
  if (derivative) return derivative(s);
  const auto plus = value(s + h);
  const auto minus = value(s - h);
  auto out = plus;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.components()[i] = (plus.components()[i] - minus.components()[i]) / (2 * h);
  }
  return out.with_anchor(s);
}

TensorComponents tensor_derivation_apply(const TensorCoefficients& coefs, const TensorSection& t, double s) {
  const auto x = t.value(s);
  auto d = t.derivative_at(s);
  if (x.p() == 0 && x.q() == 0) {
    d.components()[0] += coefs.scalar * x.components()[0];
    return d.with_anchor(s);
  }
  const auto action = apply_slot_generators(x, coefs.vector, coefs.covector);
  for (std::size_t i = 0; i < d.size(); ++i) d.components()[i] += action.components()[i];
  return d.with_anchor(s);
}

}  // namespace pathlift
