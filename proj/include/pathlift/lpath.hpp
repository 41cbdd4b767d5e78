#pragma once

#include "pathlift/geometry.hpp"
#include "pathlift/transport.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pathlift {

/// Transport coefficients along the unknown path as a function of the local
/// state: (s, γ(s), γ̇(s)) ↦ [Γ^i_j(s; γ)].
using CoefficientProvider = std::function<Matrix(double s, const Vector& x, const Vector& v)>;

struct LPathProblem {
  Chart chart;
  CoefficientProvider provider;
  Vector x0;        // γ(s₀)
  Vector X0;        // γ̇(s₀)
  double s0 = 0.0;
  Interval domain;
};

struct LPathSample {
  double s;
  Vector x;
  Vector v;
};

struct LPathSolution {
  std::vector<LPathSample> samples;  // ascending in s
  std::string method = "rk4";
  double step = 0.0;
  /// Set when the trajectory left the chart; samples then cover only the
  /// part of the domain reached before the exit.
  bool truncated = false;
  std::string truncation_reason;

  /// Spline through the sampled positions (needs a uniform grid).
  PathCurve to_path(const Chart& chart) const;
};

/// Integrates γ′ = v, v′ = −Γ(s, γ, v) v from (x₀, X₀) at s₀ over the whole
/// domain with fixed-step RK4. Leaving the chart truncates the solution;
/// non-finite provider values throw NumericalError.
LPathSolution solve_lpath(const LPathProblem& problem, StepConfig steps = {});

/// (s, x, v) ↦ [Γ^i_{jk}(x) v^k], the parallel transport of `conn`.
CoefficientProvider geodesic_provider(const ConnectionField& conn);

/// max over interior grid points of max(‖dv/ds + Γ v‖, ‖dx/ds − v‖) using
/// three-point differences of the stored samples.
double lpath_residual(const LPathSolution& solution, const CoefficientProvider& provider);

struct FrameLinearityReport {
  double max_deviation = 0.0;  // max ‖u(s) − u(s₀)‖ over the grid
  Vector initial_components;   // u at the first sample
  std::vector<Vector> components;
};

/// Velocity components u(s) = F(s) γ̇(s) in the special frame of `gen` and
/// their deviation from constancy.
FrameLinearityReport special_frame_linearity(const LPathSolution& solution, const TransportGenerator& gen);

}  // namespace pathlift
