#pragma once

#include "pathlift/derivation.hpp"
#include "pathlift/geometry.hpp"
#include "pathlift/lpath.hpp"
#include "pathlift/scene.hpp"
#include "pathlift/tensor.hpp"
#include "pathlift/transport.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathlift {

/// Numerical objects built from a validated scene.
class SceneModel {
 public:
  /// `step_override` takes precedence over the scene's integrator step.
  explicit SceneModel(Scene scene, std::optional<double> step_override = std::nullopt);

  const Scene& scene() const { return scene_; }
  const Chart& chart() const { return chart_; }
  StepConfig steps() const { return steps_; }
  int dim() const { return chart_.dim(); }

  Interval domain() const;
  bool has_path() const;
  /// Throws ValidationError when the scene does not define what is asked.
  const PathCurve& path() const;
  const TransportSpec& transport_spec() const;

  TransportKind kind() const { return transport_spec().kind; }
  ConnectionField connection() const;
  CoefficientField coefficients() const;
  TransportMatrixFamily family() const;
  /// The scene's generator, or F(s) = H(lo, s) for other kinds.
  TransportGenerator generator() const;
  TensorTransportRule tensor_rule() const;
  CoefficientProvider provider() const;

  double s0() const;
  double t() const;
  Vector vector() const;
  Vector x0() const;
  Vector velocity0() const;
  TensorComponents tensor(double anchor) const;
  int grid(int fallback) const;

 private:
  Scene scene_;
  Chart chart_;
  StepConfig steps_;
  std::optional<PathCurve> path_;
};

struct CheckLaw {
  std::string id;
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct CheckReport {
  std::uint64_t seed = 0;
  std::vector<CheckLaw> laws;
  bool pass() const;
  const CheckLaw* first_failure() const;
};

/// Runs every invariant suite that applies to the scene's transport.
/// Tolerances come from, in order: `uniform_tolerance`, the scene's
/// `tolerances` section, the built-in defaults.
CheckReport run_check_suite(const SceneModel& model, std::uint64_t seed,
                            std::optional<double> uniform_tolerance = std::nullopt);

}  // namespace pathlift
