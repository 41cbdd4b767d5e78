#include "pathlift/errors.hpp"
#include "pathlift/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pathlift {

bool CheckReport::pass() const {
  return std::all_of(laws.begin(), laws.end(), [](const CheckLaw& l) { return l.pass; });
}

const CheckLaw* CheckReport::first_failure() const {
  for (const auto& l : laws) {
    if (!l.pass) return &l;
  }
  return nullptr;
}

namespace {

struct Default {
  const char* id;
  const char* name;
  double generator_tol;
  double ode_tol;
};

constexpr Default kLaws[] = {
    {"identity", "identity at coincident parameters", 1e-12, 1e-12},
    {"cocycle", "cocycle composition", 1e-12, 1e-7},
    {"inverse", "transport inverse", 1e-10, 1e-7},
    {"round_trip", "generator to coefficients round trip", 1e-7, 1e-7},
    {"special_frame", "special frame identity", 1e-8, 1e-7},
    {"tensor_product", "tensor product consistency", 1e-10, 1e-10},
    {"contraction", "contraction commutation", 1e-10, 1e-10},
    {"covector_inverse", "mutually inverse vector/covector matrices", 1e-10, 1e-10},
    {"scalar", "scalar invariance", 1e-10, 1e-10},
    {"linearity", "derivation linearity", 1e-12, 1e-12},
    {"leibniz", "Leibniz rule", 1e-9, 1e-9},
    {"section_equivalence", "transport equation equivalence", 1e-7, 1e-7},
};

class Suite {
 public:
  Suite(const SceneModel& model, std::uint64_t seed, std::optional<double> uniform)
      : model_(model), rng_(seed), uniform_(uniform), ode_(model.kind() != TransportKind::Generator) {
    report_.seed = seed;
  }

  void record(const char* id, double deviation) {
    const auto* d = std::find_if(std::begin(kLaws), std::end(kLaws), [id](const Default& l) {
      return std::string_view(l.id) == id;
    });
    double tol = ode_ ? d->ode_tol : d->generator_tol;
    if (auto it = model_.scene().tolerances.find(id); it != model_.scene().tolerances.end()) tol = it->second;
    if (uniform_) tol = *uniform_;
    report_.laws.push_back({d->id, d->name, deviation, tol, deviation <= tol});
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double param() { return uniform(model_.domain().lo, model_.domain().hi); }

  Vector random_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
  }

  // σ(s) = a + b sin(ωs) + c cos(ωs) with its exact derivative.
  SectionAlongPath random_section(const PathCurve& path) {
    const int n = path.chart().dim();
    const Vector a = random_vector(n), b = random_vector(n), c = random_vector(n);
    const double w = uniform(0.5, 2.0);
    return SectionAlongPath(
        path, [a, b, c, w](double s) { return Vector(a + b * std::sin(w * s) + c * std::cos(w * s)); },
        [b, c, w](double s) { return Vector(w * (b * std::cos(w * s) - c * std::sin(w * s))); });
  }

  CheckReport run() {
    const auto fam = model_.family();
    const int n = model_.dim();
    const Matrix id = Matrix::Identity(n, n);

    double dev = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double s = param();
      dev = std::max(dev, max_abs(fam(s, s) - id));
    }
    record("identity", dev);

    dev = 0.0;
    const int triples = ode_ ? 10 : 50;
    for (int k = 0; k < triples; ++k) {
      const double r = param(), t = param(), s = param();
      dev = std::max(dev, max_abs(fam(r, t) * fam(t, s) - fam(r, s)));
    }
    record("cocycle", dev);

    dev = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double t = param(), s = param();
      dev = std::max(dev, max_abs(fam(t, s) * fam(s, t) - id));
    }
    record("inverse", dev);

    const auto gen = model_.generator();
    const auto coef = model_.coefficients();
    if (!ode_) {
      dev = 0.0;
      for (int k = 0; k < 10; ++k) {
        const double t = param(), s = param();
        dev = std::max(dev, max_abs(matrix_from_coefficients(coef, t, s, model_.steps()) - fam(t, s)));
      }
      record("round_trip", dev);
    }

    dev = 0.0;
    const auto reexpressed = change_transport_frame(fam, [gen](double s) { return gen.inverse(s); });
    for (int k = 0; k < 10; ++k) {
      const double t = param(), s = param();
      dev = std::max(dev, max_abs(reexpressed(t, s) - id));
    }
    record("special_frame", dev);

    const auto rule = model_.tensor_rule();
    double product = 0.0, contraction = 0.0, inverse = 0.0, scalar = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t = param(), s = param();
      const auto r = check_consistency(rule, t, s, rng_());
      product = std::max(product, r.product.max_deviation);
      contraction = std::max(contraction, r.contraction.max_deviation);
      inverse = std::max(inverse, r.inverse.max_deviation);
      scalar = std::max(scalar, r.scalar.max_deviation);
    }
    record("tensor_product", product);
    record("contraction", contraction);
    record("covector_inverse", inverse);
    record("scalar", scalar);

    const auto& path = coef.path();
    dev = 0.0;
    for (int k = 0; k < 5; ++k) {
      const auto s1 = random_section(path), s2 = random_section(path);
      const double a = uniform(-2.0, 2.0), b = uniform(-2.0, 2.0);
      const SectionAlongPath combo(
          path, [=](double s) { return Vector(a * s1.value(s) + b * s2.value(s)); },
          [=](double s) { return Vector(a * s1.derivative(s) + b * s2.derivative(s)); });
      const auto d1 = derivation_apply(coef, s1), d2 = derivation_apply(coef, s2), dc = derivation_apply(coef, combo);
      for (int j = 0; j < 5; ++j) {
        const double s = param();
        dev = std::max(dev, (dc(s) - a * d1(s) - b * d2(s)).cwiseAbs().maxCoeff());
      }
    }
    record("linearity", dev);

    const double w = uniform(0.5, 2.0);
    const ScalarFunction f{[w](double s) { return std::exp(std::sin(w * s)); },
                           [w](double s) { return w * std::cos(w * s) * std::exp(std::sin(w * s)); }};
    record("leibniz", leibniz_check(coef, f, random_section(path), 21));

    const auto [lo, hi] = model_.domain();
    const double s0 = model_.s0();
    const Vector sigma0 = random_vector(n);
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(lo + (hi - lo) * k / 19.0);
    const auto solved = solve_transport_equation(coef, sigma0, s0, grid, model_.steps());
    dev = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      dev = std::max(dev, (solved.values[k] - transport_vector(fam, grid[k], s0, sigma0)).cwiseAbs().maxCoeff());
    }
    record("section_equivalence", dev);

    return report_;
  }

 private:
  const SceneModel& model_;
  std::mt19937_64 rng_;
  std::optional<double> uniform_;
  bool ode_;
  CheckReport report_;
};

}  // namespace

CheckReport run_check_suite(const SceneModel& model, std::uint64_t seed, std::optional<double> uniform_tolerance) {
  return Suite(model, seed, uniform_tolerance).run();
}

}  // namespace pathlift
