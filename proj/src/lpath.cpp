#include "pathlift/lpath.hpp"

#include "pathlift/errors.hpp"
#include "pathlift/rk4.hpp"

#include <algorithm>
#include <cmath>

namespace pathlift {

namespace {

struct Exited {};

// Integrates from s0 to `to`, appending every step's state to `out`. Returns
// false when the chart was left.
bool march(const LPathProblem& pb, double to, double step, std::vector<LPathSample>& out) {
  const auto n = static_cast<Eigen::Index>(pb.chart.dim());
  auto rhs = [&pb, n](double s, const Vector& y) -> Vector {
    const Vector x = y.head(n);
    const Vector v = y.tail(n);
    if (!pb.chart.contains(x)) throw Exited{};
    const Matrix g = pb.provider(s, x, v);
    if (g.rows() != n || g.cols() != n) throw ValidationError("coefficient provider returned wrong shape");
    if (!g.allFinite()) throw NumericalError("coefficient provider is not finite at s = " + std::to_string(s));
    Vector dy(2 * n);
    dy.head(n) = v;
    dy.tail(n) = -g * v;
    return dy;
  };
  Vector y(2 * n);
  y << pb.x0, pb.X0;
  bool inside = true;
  try {
    rk4_integrate(rhs, y, pb.s0, to, step, [&](double s, const Vector& state) {
      if (!state.allFinite()) throw NumericalError("L-path integration produced non-finite values");
      if (!pb.chart.contains(state.head(n))) {
        inside = false;
        return false;
      }
      out.push_back({s, state.head(n), state.tail(n)});
      return true;
    });
  } catch (const Exited&) {
    inside = false;
  }
  return inside;
}

}  // namespace

LPathSolution solve_lpath(const LPathProblem& pb, StepConfig steps) {
  const int n = pb.chart.dim();
  if (!pb.provider) throw ValidationError("L-path problem has no coefficient provider");
  if (pb.x0.size() != n || pb.X0.size() != n) throw ValidationError("initial point/velocity have wrong dimension");
  if (!pb.X0.allFinite()) throw ValidationError("initial velocity is not finite");
  if (!(pb.domain.lo < pb.domain.hi)) throw ValidationError("L-path domain is empty");
  if (!pb.domain.contains(pb.s0)) throw ValidationError("s0 lies outside the L-path domain");
  pb.chart.require_contains(pb.x0, "L-path initial point");

  LPathSolution sol;
  sol.step = steps.step;
  std::vector<LPathSample> backward;
  const bool back_ok = pb.s0 > pb.domain.lo ? march(pb, pb.domain.lo, steps.step, backward) : true;
  std::vector<LPathSample> forward;
  const bool fwd_ok = pb.s0 < pb.domain.hi ? march(pb, pb.domain.hi, steps.step, forward) : true;

  sol.samples.assign(backward.rbegin(), backward.rend());
  sol.samples.push_back({pb.s0, pb.x0, pb.X0});
  sol.samples.insert(sol.samples.end(), forward.begin(), forward.end());
  if (!back_ok || !fwd_ok) {
    sol.truncated = true;
    sol.truncation_reason = "trajectory left chart '" + pb.chart.name() + "' ";
    sol.truncation_reason += !back_ok ? "before reaching the domain start" : "before reaching the domain end";
  }
  return sol;
}

PathCurve LPathSolution::to_path(const Chart& chart) const {
  if (samples.size() < 2) throw ValidationError("L-path solution has fewer than two samples");
  std::vector<Vector> xs;
  xs.reserve(samples.size());
  for (const auto& p : samples) xs.push_back(p.x);
  return PathCurve::sampled(chart, {samples.front().s, samples.back().s}, std::move(xs));
}

CoefficientProvider geodesic_provider(const ConnectionField& conn) {
  return [conn](double, const Vector& x, const Vector& v) { return conn.coefficients(x).contract_velocity(v); };
}

double lpath_residual(const LPathSolution& solution, const CoefficientProvider& provider) {
  const auto& pts = solution.samples;
  if (pts.size() < 3) throw ValidationError("lpath_residual needs at least three samples");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    // Three-point derivative on a possibly uneven grid.
    const double h0 = pts[i].s - pts[i - 1].s;
    const double h1 = pts[i + 1].s - pts[i].s;
    const double wm = -h1 / (h0 * (h0 + h1));
    const double w0 = (h1 - h0) / (h0 * h1);
    const double wp = h0 / (h1 * (h0 + h1));
    const Vector dv = wm * pts[i - 1].v + w0 * pts[i].v + wp * pts[i + 1].v;
    const Vector dx = wm * pts[i - 1].x + w0 * pts[i].x + wp * pts[i + 1].x;
    const Vector eq = dv + provider(pts[i].s, pts[i].x, pts[i].v) * pts[i].v;
    worst = std::max({worst, max_abs(eq), max_abs(dx - pts[i].v)});
  }
  return worst;
}

FrameLinearityReport special_frame_linearity(const LPathSolution& solution, const TransportGenerator& gen) {
  if (solution.samples.empty()) throw ValidationError("special_frame_linearity: empty solution");
  FrameLinearityReport report;
  for (const auto& p : solution.samples) {
    Matrix f = gen.value(p.s);
    (void)checked_inverse(f, gen.cond_cap(), "generator along the L-path");
    report.components.push_back(f * p.v);
  }
  report.initial_components = report.components.front();
  for (const auto& u : report.components) {
    report.max_deviation = std::max(report.max_deviation, max_abs(u - report.initial_components));
  }
  return report;
}

}  // namespace pathlift
