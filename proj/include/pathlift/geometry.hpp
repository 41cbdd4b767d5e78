#pragma once

#include "pathlift/expression.hpp"
#include "pathlift/linalg.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pathlift {

/// Closed real interval [lo, hi] (also used for open chart boxes, see Chart).
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double s, double slack = 0.0) const { return s >= lo - slack && s <= hi + slack; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A coordinate chart. Bounded axes describe an open box; points on or
/// beyond a bound are outside the chart.
class Chart {
 public:
  /// `periods` marks angular axes; positions on them are compared modulo
  /// the period.
  Chart(int dim, std::string name, std::vector<std::optional<Interval>> bounds = {},
        std::vector<std::optional<double>> periods = {});

  /// ℝⁿ with no bounds.
  static Chart euclidean(int dim);
  /// Spherical chart (θ, φ) of the unit 2-sphere, θ ∈ (0, π), φ unbounded
  /// with period 2π.
  static Chart unit_sphere();

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<std::optional<Interval>>& bounds() const { return bounds_; }
  const std::vector<std::optional<double>>& periods() const { return periods_; }
  /// Max over axes of |a − b|, reduced modulo the period on periodic axes.
  double coordinate_gap(const Vector& a, const Vector& b) const;

  bool contains(const Vector& x) const;
  /// Throws ValidationError naming `what` when x lies outside the chart.
  void require_contains(const Vector& x, const std::string& what) const;

 private:
  int dim_;
  std::string name_;
  std::vector<std::optional<Interval>> bounds_;
  std::vector<std::optional<double>> periods_;
};

/// A C¹ path s ↦ γ(s) on a chart, with its velocity.
///
/// Closed-form paths evaluate user callables; sampled paths interpolate a
/// uniform grid with a not-a-knot cubic spline and differentiate the spline.
/// Copies share the underlying representation, and `same_path` tests for it.
class PathCurve {
 public:
  using PointFn = std::function<Vector(double)>;
  enum class Representation { ClosedForm, Sampled };

  /// Step of the centered difference used when no velocity is supplied.
  static constexpr double kFiniteDifferenceStep = 1e-6;
  /// Default allowed gap between a velocity and centered differences.
  static constexpr double kDefaultFdTolerance = 1e-4;

  static PathCurve closed_form(Chart chart, Interval domain, PointFn position,
                               std::optional<PointFn> velocity = std::nullopt);
  /// `samples` are positions at the uniform grid lo, lo + h, ..., hi.
  static PathCurve sampled(Chart chart, Interval domain, std::vector<Vector> samples);

  const Chart& chart() const;
  const Interval& domain() const;
  Representation representation() const;
  bool has_analytic_velocity() const;

  /// Throws ValidationError when s ∉ J or γ(s) leaves the chart.
  Vector position(double s) const;
  Vector velocity(double s) const;

  /// Max gap between the velocity and centered differences of the
  /// position (step h) over `samples` evenly spaced parameters.
  double velocity_consistency(int samples = 101, double h = kFiniteDifferenceStep) const;

  bool same_path(const PathCurve& other) const { return impl_ == other.impl_; }

 private:
  struct Impl;
  explicit PathCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Builds a path from coordinate expressions in `s`. Velocity expressions
/// are optional; without them the velocity is a centered difference. Given
/// velocities must agree with centered differences to kDefaultFdTolerance.
PathCurve make_path(const Chart& chart, Interval domain, const std::vector<Expression>& position,
                    const std::vector<Expression>& velocity = {});

/// Basis of the fiber along a path: columns of basis(s) are the vectors
/// e_i(s) in the chart's coordinate basis.
class FrameField {
 public:
  using BasisFn = std::function<Matrix(double)>;

  FrameField(PathCurve path, BasisFn basis, double cond_cap = kFrameConditionCap);

  /// The coordinate frame ∂/∂x^i along `path`.
  static FrameField coordinate(PathCurve path);

  const PathCurve& path() const { return path_; }
  double cond_cap() const { return cond_cap_; }

  /// Throws NumericalError when the basis exceeds the condition cap.
  Matrix basis(double s) const;

 private:
  PathCurve path_;
  BasisFn basis_;
  double cond_cap_;
};

/// A(s) with e^b_i(s) = A^j_i(s) e^a_j(s), i.e. basis_a(s)⁻¹ basis_b(s).
Matrix frame_change_matrix(const FrameField& frame_a, const FrameField& frame_b, double s);

/// Γ^i_{jk} at one point; entry (i, j, k) with the upper index first.
class Christoffel {
 public:
  explicit Christoffel(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double operator()(int i, int j, int k) const { return data_[offset(i, j, k)]; }
  double& operator()(int i, int j, int k) { return data_[offset(i, j, k)]; }
  const std::vector<double>& data() const { return data_; }

  /// Matrix [Γ^i_{jk} v^k]_{ij}.
  Matrix contract_velocity(const Vector& v) const;

 private:
  std::size_t offset(int i, int j, int k) const { return static_cast<std::size_t>((i * dim_ + j) * dim_ + k); }
  int dim_;
  std::vector<double> data_;
};

/// Coefficients x ↦ Γ^i_{jk}(x) of an affine connection on a chart.
class ConnectionField {
 public:
  using CoefficientFn = std::function<Christoffel(const Vector&)>;

  ConnectionField(Chart chart, CoefficientFn fn, std::string name = "custom");

  static ConnectionField flat(int dim);
  /// Levi-Civita connection of the round metric dθ² + sin²θ dφ².
  static ConnectionField unit_sphere();

  const Chart& chart() const { return chart_; }
  const std::string& name() const { return name_; }

  /// Throws ValidationError outside the chart, NumericalError on
  /// non-finite values.
  Christoffel coefficients(const Vector& x) const;

 private:
  Chart chart_;
  CoefficientFn fn_;
  std::string name_;
};

inline Christoffel connection_coefficients(const ConnectionField& conn, const Vector& x) {
  return conn.coefficients(x);
}

}  // namespace pathlift
