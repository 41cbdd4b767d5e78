#include "pathlift/transport.hpp"

#include "pathlift/errors.hpp"

#include <cmath>
#include <string>

namespace pathlift {

namespace {

void require_in_domain(const PathCurve& path, double s, const char* what) {
  const auto& d = path.domain();
  if (!d.contains(s, 1e-12 * std::max(1.0, d.length()))) {
    throw ValidationError(std::string(what) + ": parameter " + std::to_string(s) + " outside path domain");
  }
}

void require_shape(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError(std::string(what) + ": expected a " + std::to_string(n) + "x" + std::to_string(n) +
                          " matrix");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

TransportGenerator::TransportGenerator(PathCurve path, MatrixFn f, std::optional<MatrixFn> df, double cond_cap)
    : path_(std::move(path)), f_(std::move(f)), df_(df && *df ? std::move(df) : std::nullopt), cond_cap_(cond_cap) {
  if (!f_) throw ValidationError("generator function is empty");
}

Matrix TransportGenerator::value(double s) const {
  require_in_domain(path_, s, "generator");
  Matrix f = f_(s);
  require_shape(f, rank(), "generator");
  if (!f.allFinite()) throw NumericalError("generator is not finite at s = " + std::to_string(s));
  return f;
}

Matrix TransportGenerator::derivative(double s) const {
  if (df_) {
    require_in_domain(path_, s, "generator derivative");
    Matrix d = (*df_)(s);
    require_shape(d, rank(), "generator derivative");
    return d;
  }
  const double h = kFiniteDifferenceStep;
  const auto& d = path_.domain();
  if (s - h >= d.lo && s + h <= d.hi) return (value(s + h) - value(s - h)) / (2 * h);
  if (s - h < d.lo) return (-3.0 * value(s) + 4.0 * value(s + h) - value(s + 2 * h)) / (2 * h);
  return (3.0 * value(s) - 4.0 * value(s - h) + value(s - 2 * h)) / (2 * h);
}

Matrix TransportGenerator::inverse(double s) const {
  return checked_inverse(value(s), cond_cap_, "generator at s = " + std::to_string(s));
}

// ---------------------------------------------------------------------------

TransportMatrixFamily::TransportMatrixFamily(PathCurve path, TwoPointMatrixFn h, Provenance provenance)
    : path_(std::move(path)), h_(std::move(h)), provenance_(provenance) {
  if (!h_) throw ValidationError("transport matrix function is empty");
}

Matrix TransportMatrixFamily::operator()(double t, double s) const {
  require_in_domain(path_, t, "transport matrix");
  require_in_domain(path_, s, "transport matrix");
  Matrix m = h_(t, s);
  require_shape(m, rank(), "transport matrix");
  if (!m.allFinite()) throw NumericalError("transport matrix is not finite");
  return m;
}

CoefficientField::CoefficientField(PathCurve path, MatrixFn gamma) : path_(std::move(path)), gamma_(std::move(gamma)) {
  if (!gamma_) throw ValidationError("coefficient function is empty");
}

Matrix CoefficientField::operator()(double s) const {
  require_in_domain(path_, s, "transport coefficients");
  Matrix g = gamma_(s);
  require_shape(g, rank(), "transport coefficients");
  if (!g.allFinite()) throw NumericalError("transport coefficients are not finite at s = " + std::to_string(s));
  return g;
}

// ---------------------------------------------------------------------------

Matrix matrix_from_generator(const TransportGenerator& gen, double t, double s) {
  const Matrix fs = gen.value(s);
  require_invertible(fs, gen.cond_cap(), "generator at s = " + std::to_string(s));
  if (t == s) return Matrix::Identity(gen.rank(), gen.rank());
  return checked_solve(gen.value(t), fs, gen.cond_cap(), "generator at t = " + std::to_string(t));
}

Matrix coefficients_from_generator(const TransportGenerator& gen, double s) {
  return checked_solve(gen.value(s), gen.derivative(s), gen.cond_cap(), "generator at s = " + std::to_string(s));
}

Matrix matrix_from_coefficients(const CoefficientField& coef, double t, double s, StepConfig steps) {
  require_in_domain(coef.path(), t, "transport matrix");
  require_in_domain(coef.path(), s, "transport matrix");
  const int n = coef.rank();
  auto rhs = [&coef](double u, const Matrix& h) -> Matrix { return -coef(u) * h; };
  Matrix h = rk4_integrate(rhs, Matrix(Matrix::Identity(n, n)), s, t, steps.step);
  if (!h.allFinite()) throw NumericalError("transport integration produced non-finite values");
  return h;
}

TransportMatrixFamily family_from_generator(const TransportGenerator& gen) {
  return TransportMatrixFamily(
      gen.path(), [gen](double t, double s) { return matrix_from_generator(gen, t, s); }, Provenance::FromGenerator);
}

TransportMatrixFamily family_from_coefficients(const CoefficientField& coef, StepConfig steps) {
  return TransportMatrixFamily(
      coef.path(), [coef, steps](double t, double s) { return matrix_from_coefficients(coef, t, s, steps); },
      Provenance::OdeIntegrated);
}

CoefficientField coefficients_field_from_generator(const TransportGenerator& gen) {
  return CoefficientField(gen.path(), [gen](double s) { return coefficients_from_generator(gen, s); });
}

CoefficientField parallel_transport_coefficients(const ConnectionField& conn, const PathCurve& path) {
  if (conn.chart().dim() != path.chart().dim()) {
    throw ValidationError("connection and path have different dimensions");
  }
  return CoefficientField(path, [conn, path](double s) {
    return conn.coefficients(path.position(s)).contract_velocity(path.velocity(s));
  });
}

TransportGenerator generator_from_family(const TransportMatrixFamily& h, double s0) {
  require_in_domain(h.path(), s0, "generator base point");
  return TransportGenerator(h.path(), [h, s0](double s) { return h(s0, s); });
}

Vector transport_vector(const TransportMatrixFamily& h, double t, double s, const Vector& v) {
  if (v.size() != h.rank()) throw ValidationError("vector dimension does not match transport rank");
  return h(t, s) * v;
}

FrameField special_frame(const TransportGenerator& gen) {
  return special_frame(gen, FrameField::coordinate(gen.path()));
}

FrameField special_frame(const TransportGenerator& gen, const FrameField& base) {
  if (!base.path().same_path(gen.path())) throw ValidationError("special_frame: base frame lives on another path");
  return FrameField(gen.path(), [gen, base](double s) { return Matrix(base.basis(s) * gen.inverse(s)); },
                    base.cond_cap());
}

TransportMatrixFamily change_transport_frame(const TransportMatrixFamily& h, MatrixFn change) {
  if (!change) throw ValidationError("frame change function is empty");
  return TransportMatrixFamily(
      h.path(),
      [h, change](double t, double s) {
        return Matrix(checked_solve(change(t), h(t, s) * change(s), kGeneratorConditionCap, "frame change"));
      },
      h.provenance());
}

TransportGenerator change_generator_frame(const TransportGenerator& gen, MatrixFn change) {
  if (!change) throw ValidationError("frame change function is empty");
  return TransportGenerator(gen.path(), [gen, change](double s) { return Matrix(gen.value(s) * change(s)); },
                            std::nullopt, gen.cond_cap());
}

Matrix holonomy(const TransportMatrixFamily& h, const PathCurve& loop, double closure_tolerance) {
  const auto& d = loop.domain();
  const double gap = loop.chart().coordinate_gap(loop.position(d.hi), loop.position(d.lo));
  if (gap > closure_tolerance) {
    throw ValidationError("holonomy: path is not closed (end points differ by " + std::to_string(gap) + ")");
  }
  if (!h.path().same_path(loop) && h.path().domain() != d) {
    throw ValidationError("holonomy: transport is defined along a different path");
  }
  return h(d.hi, d.lo);
}

}  // namespace pathlift
