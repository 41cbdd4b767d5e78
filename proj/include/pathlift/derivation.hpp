#pragma once

#include "pathlift/geometry.hpp"
#include "pathlift/tensor.hpp"
#include "pathlift/transport.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace pathlift {

using VectorFn = std::function<Vector(double)>;

/// Components s ↦ σ^i(γ(s)) of a section along a path in the working frame.
class SectionAlongPath {
 public:
  static constexpr double kFiniteDifferenceStep = 1e-6;

  SectionAlongPath(PathCurve path, VectorFn components, std::optional<VectorFn> derivative = std::nullopt,
                   bool c1 = true);

  const PathCurve& path() const { return path_; }
  bool is_c1() const { return c1_; }

  Vector value(double s) const;
  /// dσ/ds, analytic when supplied, otherwise a centered difference.
  Vector derivative(double s) const;

 private:
  PathCurve path_;
  VectorFn components_;
  std::optional<VectorFn> derivative_;
  bool c1_;
};

/// A real function of the path parameter with an optional derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // may be empty

  double derivative_at(double s) const;
};

struct DerivationResult {
  PathCurve path;
  VectorFn components;

  Vector operator()(double s) const { return components(s); }
};

/// (𝒟σ)^i = dσ^i/ds + Γ^i_j(s) σ^j.
DerivationResult derivation_apply(const CoefficientField& coef, const SectionAlongPath& sigma);

struct LimitCheckReport {
  std::vector<double> eps;
  std::vector<double> deviations;  // ‖quotient(ε) − reference‖
  std::vector<Vector> quotients;
  /// Mean log-ratio slope of deviations against ε (≈ 1 for C¹ data).
  double order = 0.0;
};

inline const std::vector<double> kDefaultEpsSchedule{1e-2, 1e-3, 1e-4};

/// Evaluates the difference quotient [H(s, s+ε) σ(s+ε) − σ(s)] / ε for each ε
/// (using −ε near the right end of the domain) against `reference`.
LimitCheckReport derivation_limit_check(const TransportMatrixFamily& h, const SectionAlongPath& sigma, double s,
                                        const Vector& reference,
                                        const std::vector<double>& eps = kDefaultEpsSchedule);

/// Same, with the reference taken from derivation_apply(coef, σ)(s).
LimitCheckReport derivation_limit_check(const TransportMatrixFamily& h, const CoefficientField& coef,
                                        const SectionAlongPath& sigma, double s,
                                        const std::vector<double>& eps = kDefaultEpsSchedule);

/// The section t ↦ H(t, s₀) u.
SectionAlongPath transported_section(const TransportMatrixFamily& h, double s0, const Vector& u);

/// max over `samples` parameters of ‖𝒟(fσ) − f′σ − f𝒟σ‖.
double leibniz_check(const CoefficientField& coef, const ScalarFunction& f, const SectionAlongPath& sigma,
                     int samples = 41);

struct TransportedSection {
  SectionAlongPath section;     // evaluates by integrating from s₀
  std::vector<double> grid;
  std::vector<Vector> values;   // σ on `grid`
};

/// Solves dσ/ds + Γ(s) σ = 0 with σ(s₀) = σ₀ by fixed-step RK4, sampling the
/// solution on `grid`.
TransportedSection solve_transport_equation(const CoefficientField& coef, const Vector& sigma0, double s0,
                                            const std::vector<double>& grid, StepConfig steps = {});

struct LTransportReport {
  bool transported = false;
  double max_deviation = 0.0;
};

/// max over sample pairs (s, t) of ‖σ(t) − H(t, s) σ(s)‖ against `tolerance`.
LTransportReport is_l_transported(const TransportMatrixFamily& h, const SectionAlongPath& sigma, double tolerance,
                                  int samples = 11);

/// Scalar variant: σ(t) against h(t, s) σ(s) under a tensor rule.
LTransportReport is_l_transported_scalar(const TensorTransportRule& rule, const Interval& domain,
                                         const std::function<double(double)>& sigma, double tolerance,
                                         int samples = 11);

/// H_V(s) = Γ_γ(s) − Γ^i_{jk}(γ(s)) γ̇^k(s): the part of the derivation not
/// accounted for by the covariant derivative of `conn`.
MatrixFn covariant_decomposition(const CoefficientField& coef, const ConnectionField& conn);

/// (∇_V σ)^i = dσ^i/ds + Γ^i_{jk}(γ(s)) γ̇^k σ^j along the section's path.
DerivationResult covariant_derivative_along(const ConnectionField& conn, const SectionAlongPath& sigma);

/// ∇_V σ + H_V σ, which must reproduce derivation_apply.
DerivationResult reconstructed_derivation(const ConnectionField& conn, const MatrixFn& hv,
                                          const SectionAlongPath& sigma);

/// Infinitesimal slot actions of a tensor transport at s: ∂/∂s of the
/// vector matrix, covector matrix and scalar factor at t = s.
struct TensorCoefficients {
  Matrix vector;
  Matrix covector;
  double scalar = 0.0;
};

/// Full-consistency coefficients from the vector coefficients: the covector
/// action is −Γᵀ and scalars are inert.
TensorCoefficients tensor_coefficients(const Matrix& gamma);

/// Coefficients of an arbitrary rule by centered differences in s.
TensorCoefficients tensor_coefficients(const TensorTransportRule& rule, double s, double h = 1e-6);

/// A tensor field along a path, s ↦ T(s), anchored at s.
struct TensorSection {
  std::function<TensorComponents(double)> value;
  std::function<TensorComponents(double)> derivative;  // may be empty

  TensorComponents derivative_at(double s, double h = 1e-6) const;
};

/// (𝒟T)(s) = dT/ds + slot-wise action of the coefficients on T(s).
TensorComponents tensor_derivation_apply(const TensorCoefficients& coefs, const TensorSection& t, double s);

}  // namespace pathlift
