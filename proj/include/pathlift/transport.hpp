#pragma once

#include "pathlift/geometry.hpp"
#include "pathlift/linalg.hpp"
#include "pathlift/rk4.hpp"

#include <functional>
#include <optional>

namespace pathlift {

using MatrixFn = std::function<Matrix(double)>;
using TwoPointMatrixFn = std::function<Matrix(double t, double s)>;

/// A generator F of a linear transport along a path: the transport matrix is
/// H(t,s) = F(t)⁻¹ F(s). F is only defined up to a constant left factor; any
/// representative is accepted.
class TransportGenerator {
 public:
  /// Step of the centered difference used when dF is not supplied.
  static constexpr double kFiniteDifferenceStep = 1e-6;

  TransportGenerator(PathCurve path, MatrixFn f, std::optional<MatrixFn> df = std::nullopt,
                     double cond_cap = kGeneratorConditionCap);

  const PathCurve& path() const { return path_; }
  int rank() const { return path_.chart().dim(); }
  bool has_analytic_derivative() const { return df_.has_value(); }
  double cond_cap() const { return cond_cap_; }

  Matrix value(double s) const;
  /// dF/ds, analytic when supplied, otherwise a centered difference.
  Matrix derivative(double s) const;
  Matrix inverse(double s) const;

 private:
  PathCurve path_;
  MatrixFn f_;
  std::optional<MatrixFn> df_;
  double cond_cap_;
};

enum class Provenance { ClosedForm, FromGenerator, OdeIntegrated };

/// The matrix family (t, s) ↦ H(t, s) of a transport along a path, with the
/// way it was built so that checks can pick tolerances accordingly.
class TransportMatrixFamily {
 public:
  TransportMatrixFamily(PathCurve path, TwoPointMatrixFn h, Provenance provenance);

  const PathCurve& path() const { return path_; }
  int rank() const { return path_.chart().dim(); }
  Provenance provenance() const { return provenance_; }

  /// Throws ValidationError when t or s lies outside the path domain.
  Matrix operator()(double t, double s) const;

 private:
  PathCurve path_;
  TwoPointMatrixFn h_;
  Provenance provenance_;
};

/// s ↦ Γ_γ(s) = [Γ^i_j(s)], the infinitesimal form of a transport.
class CoefficientField {
 public:
  CoefficientField(PathCurve path, MatrixFn gamma);

  const PathCurve& path() const { return path_; }
  int rank() const { return path_.chart().dim(); }

  /// Throws NumericalError on non-finite entries.
  Matrix operator()(double s) const;

 private:
  PathCurve path_;
  MatrixFn gamma_;
};

/// H(t, s) = F(t)⁻¹ F(s).
Matrix matrix_from_generator(const TransportGenerator& gen, double t, double s);

/// Γ(s) = F(s)⁻¹ dF(s)/ds.
Matrix coefficients_from_generator(const TransportGenerator& gen, double s);

/// H(t, s) by integrating dH/dt = -Γ(t) H from H(s, s) = I with fixed-step
/// RK4.
Matrix matrix_from_coefficients(const CoefficientField& coef, double t, double s, StepConfig steps = {});

TransportMatrixFamily family_from_generator(const TransportGenerator& gen);
TransportMatrixFamily family_from_coefficients(const CoefficientField& coef, StepConfig steps = {});
CoefficientField coefficients_field_from_generator(const TransportGenerator& gen);

/// Coefficients of the parallel transport of a connection along a path:
/// Γ^i_j(s) = Γ^i_{jk}(γ(s)) γ̇^k(s).
CoefficientField parallel_transport_coefficients(const ConnectionField& conn, const PathCurve& path);

/// A generator for any transport family: F(s) = H(s₀, s).
TransportGenerator generator_from_family(const TransportMatrixFamily& h, double s0);

/// Components H(t, s) v of the transported vector.
Vector transport_vector(const TransportMatrixFamily& h, double t, double s, const Vector& v);

/// Frame e'_i(s) = [F⁻¹(s)]^j_i e_j(s) relative to `base` (default: the
/// coordinate frame). In it the transport matrix is the identity and the
/// coefficients vanish.
FrameField special_frame(const TransportGenerator& gen);
FrameField special_frame(const TransportGenerator& gen, const FrameField& base);

/// H'(t, s) = A(t)⁻¹ H(t, s) A(s) for a change of frame s ↦ A(s).
TransportMatrixFamily change_transport_frame(const TransportMatrixFamily& h, MatrixFn change);

/// Generator of the same transport expressed in the frame reached by A:
/// F'(s) = F(s) A(s).
TransportGenerator change_generator_frame(const TransportGenerator& gen, MatrixFn change);

/// H(b, a) around a closed loop. Throws ValidationError when the end points
/// differ by more than `closure_tolerance` in chart coordinates (modulo the
/// chart's periods).
Matrix holonomy(const TransportMatrixFamily& h, const PathCurve& loop, double closure_tolerance = 1e-9);

}  // namespace pathlift
