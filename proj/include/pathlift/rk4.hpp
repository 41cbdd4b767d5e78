#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace pathlift {

/// Fixed-step integrator settings. `step` is an upper bound: an interval of
/// length L is covered by ceil(L / step) equal steps so that it lands exactly
/// on its end point.
struct StepConfig {
  double step = 1e-3;
};

inline std::size_t step_count(double from, double to, double max_step) {
  if (!(max_step > 0.0) || !std::isfinite(max_step)) {
    throw std::invalid_argument("integrator step must be positive and finite");
  }
  const double span = std::abs(to - from);
  if (span == 0.0) return 0;
  // Tolerate a span that is an integer multiple of the step up to roundoff.
  return static_cast<std::size_t>(std::ceil(span / max_step - 1e-9));
}

/// One classical fourth-order Runge-Kutta step of y' = f(s, y).
template <class State, class Rhs>
State rk4_step(Rhs& f, const State& y, double s, double h) {
  const double h2 = h / 2;
  const State k1 = f(s, y);
  const State k2 = f(s + h2, State(y + h2 * k1));
  const State k3 = f(s + h2, State(y + h2 * k2));
  const State k4 = f(s + h, State(y + h * k3));
  return State(y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4));
}

/// Integrates y' = f(s, y) from `from` to `to` (either direction). The
/// observer, if any, is called as obs(s, y) after every accepted step and
/// may return false to stop early; integrate then returns the last state.
template <class State, class Rhs, class Observer>
State rk4_integrate(Rhs&& f, State y, double from, double to, double max_step, Observer&& obs) {
  const std::size_t n = step_count(from, to, max_step);
  if (n == 0) return y;
  const double h = (to - from) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = from + h * static_cast<double>(k);
    y = rk4_step(f, y, s, h);
    const double s_next = (k + 1 == n) ? to : from + h * static_cast<double>(k + 1);
    if (!obs(s_next, y)) break;
  }
  return y;
}

template <class State, class Rhs>
State rk4_integrate(Rhs&& f, State y, double from, double to, double max_step) {
  return rk4_integrate(std::forward<Rhs>(f), std::move(y), from, to, max_step,
                       [](double, const State&) { return true; });
}

}  // namespace pathlift
