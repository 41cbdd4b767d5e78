#include "pathlift/cli.hpp"
#include "pathlift/derivation.hpp"
#include "pathlift/lpath.hpp"
#include "pathlift/scene.hpp"
#include "pathlift/tensor.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace pathlift;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

class Gauge {
 public:
  void at_most(const std::string& what, double value, double tol) { note(what, value, "<=", tol, value <= tol); }
  void at_least(const std::string& what, double value, double bound) { note(what, value, ">=", bound, value >= bound); }
  void within(const std::string& what, double value, double target, double tol) {
    std::ostringstream s;
    s << what << " " << std::setprecision(10) << value << " vs " << target << " (tol " << std::setprecision(3) << tol
      << ")";
    add(s.str(), std::abs(value - target) <= tol);
  }
  void require(const std::string& what, bool ok) { add(what + (ok ? "" : " NOT MET"), ok); }

  bool ok() const { return ok_; }
  const std::string& detail() const { return detail_; }

 private:
  void note(const std::string& what, double value, const char* op, double bound, bool ok) {
    std::ostringstream s;
    s << what << " " << std::setprecision(3) << value << " " << op << " " << bound;
    add(s.str(), ok);
  }
  void add(const std::string& text, bool ok) {
    ok_ = ok_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += text;
  }
  bool ok_ = true;
  std::string detail_;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds, 0 = none
  std::function<void(Gauge&)> run;
};

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Brute-force transport: every output component summed over every input component.
TensorComponents brute_transport(const TensorComponents& x, const Matrix& v, const Matrix& c, double anchor) {
  auto out = TensorComponents::zeros(x.p(), x.q(), x.dim(), anchor);
  for (std::size_t o = 0; o < out.size(); ++o) {
    const auto oi = out.multi_index(o);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto ki = x.multi_index(k);
      double w = x.components()[k];
      for (int a = 0; a < x.p(); ++a) w *= v(oi[a], ki[a]);
      for (int b = x.p(); b < x.p() + x.q(); ++b) w *= c(oi[b], ki[b]);
      sum += w;
    }
    out.components()[o] = sum;
  }
  return out;
}

TensorComponents basis_tensor(int p, int q, int dim, std::size_t k, double anchor) {
  auto e = TensorComponents::zeros(p, q, dim, anchor);
  e.components()[k] = 1.0;
  return e;
}

// ---------------------------------------------------------------------------

void cocycle_and_identity(Gauge& g) {
  std::mt19937_64 rng(101);
  double gen_cocycle = 0.0, gen_identity = 0.0, ode_cocycle = 0.0, ode_identity = 0.0;
  int triples = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 3;
    const auto gen = testing::make_generator(testing::line(n, {-1.0, 1.0}), testing::random_generator(rng, n));
    const auto fam = family_from_generator(gen);
    const auto ode = family_from_coefficients(coefficients_field_from_generator(gen), {1e-3});
    const Matrix id = Matrix::Identity(n, n);
    for (int j = 0; j < 10; ++j, ++triples) {
      const double r = uniform(rng, -1, 1), t = uniform(rng, -1, 1), s = uniform(rng, -1, 1);
      gen_cocycle = std::max(gen_cocycle, max_abs(fam(r, t) * fam(t, s) - fam(r, s)));
      gen_identity = std::max(gen_identity, max_abs(fam(s, s) - id));
      ode_cocycle = std::max(ode_cocycle, max_abs(ode(r, t) * ode(t, s) - ode(r, s)));
      ode_identity = std::max(ode_identity, max_abs(ode(s, s) - id));
    }
  }
  g.require("triples = " + std::to_string(triples), triples == 200);
  g.at_most("generator cocycle", gen_cocycle, 1e-12);
  g.at_most("generator identity", gen_identity, 1e-12);
  g.at_most("ODE cocycle", ode_cocycle, 1e-7);
  g.at_most("ODE identity", ode_identity, 1e-7);
}

void representation_round_trip(Gauge& g) {
  std::mt19937_64 rng(202);
  double from_coefficients = 0.0, coefficients = 0.0, regenerated = 0.0;
  for (int k = 0; k < 5; ++k) {
    const int n = 2 + k % 3;
    const auto sg = testing::random_generator(rng, n);
    const auto gen = testing::make_generator(testing::line(n, {-1.0, 1.0}), sg);
    const auto ode = family_from_coefficients(coefficients_field_from_generator(gen), {1e-3});
    const auto again = family_from_generator(generator_from_family(ode, -1.0));
    for (int j = 0; j < 10; ++j) {
      const double t = uniform(rng, -1, 1), s = uniform(rng, -1, 1);
      const Matrix oracle = sg.value(t).inverse() * sg.value(s);
      from_coefficients = std::max(from_coefficients, max_abs(ode(t, s) - oracle));
      regenerated = std::max(regenerated, max_abs(again(t, s) - oracle));
      coefficients =
          std::max(coefficients, max_abs(coefficients_from_generator(gen, s) - sg.value(s).inverse() * sg.derivative(s)));
    }
  }
  g.at_most("H from coefficients vs F(t)^-1 F(s), 50 pairs", from_coefficients, 1e-7);
  g.at_most("generator rebuilt from H", regenerated, 1e-7);
  g.at_most("coefficients F^-1 F'", coefficients, 1e-12);
}

void tensor_laws(Gauge& g) {
  std::mt19937_64 rng(303);
  const auto gen2 = testing::make_generator(testing::line(2, {-1.0, 1.0}), testing::random_generator(rng, 2));
  const auto rule = TensorTransportRule::full(family_from_generator(gen2));
  const double t = 0.7, s = -0.3;
  const Matrix v = rule.vector_matrix(t, s);
  const Matrix c = v.inverse().transpose();

  std::vector<TensorComponents> basis;
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const auto n = static_cast<std::size_t>(std::pow(2, p + q));
      for (std::size_t k = 0; k < n; ++k) basis.push_back(basis_tensor(p, q, 2, k, s));
    }
  double against_oracle = 0.0, product = 0.0, contraction = 0.0;
  std::vector<TensorComponents> moved;
  for (const auto& e : basis) {
    moved.push_back(transport_tensor(rule, e, t, s));
    against_oracle = std::max(against_oracle, max_deviation(moved.back(), brute_transport(e, v, c, t)));
    for (int a = 0; a < e.p(); ++a)
      for (int b = 0; b < e.q(); ++b) {
        contraction = std::max(contraction, max_deviation(transport_tensor(rule, contract(e, a, b), t, s),
                                                          contract(moved.back(), a, b)));
      }
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const auto lhs = transport_tensor(rule, tensor_product(basis[i], basis[j]), t, s);
      product = std::max(product, max_deviation(lhs, tensor_product(moved[i], moved[j])));
    }
  g.require(std::to_string(basis.size()) + " basis tensors at dim 2", basis.size() == 49);
  g.at_most("dim 2 transport vs brute force", against_oracle, 1e-9);
  g.at_most("dim 2 product law", product, 1e-9);
  g.at_most("dim 2 contraction law", contraction, 1e-9);

  double random3 = 0.0, report3 = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto gen3 = testing::make_generator(testing::line(3, {-1.0, 1.0}), testing::random_generator(rng, 3));
    const auto rule3 = TensorTransportRule::full(family_from_generator(gen3));
    const double t3 = uniform(rng, -1, 1), s3 = uniform(rng, -1, 1);
    const Matrix v3 = rule3.vector_matrix(t3, s3);
    const Matrix c3 = v3.inverse().transpose();
    for (int p = 0; p <= 2; ++p)
      for (int q = 0; q <= 2; ++q) {
        auto x = TensorComponents::zeros(p, q, 3, s3);
        for (double& y : x.components()) y = uniform(rng, -1, 1);
        random3 = std::max(random3, max_deviation(transport_tensor(rule3, x, t3, s3), brute_transport(x, v3, c3, t3)));
      }
    const auto r = check_consistency(rule3, t3, s3, rng());
    report3 = std::max({report3, r.product.max_deviation, r.contraction.max_deviation, r.inverse.max_deviation,
                        r.scalar.max_deviation});
  }
  g.at_most("dim 3 random tensors vs brute force", random3, 1e-9);
  g.at_most("dim 3 consistency laws", report3, 1e-9);

  const auto fam = family_from_generator(gen2);
  const auto bad = TensorTransportRule::tensor_product_only(
      2, [fam](double a, double b) { return fam(a, b); }, [fam](double a, double b) { return fam(a, b); },
      [](double) { return 1.0; });
  const auto r = check_consistency(bad, t, s);
  g.at_least("non-inverse covector rule contraction deviation", r.contraction.max_deviation, 0.1);
  g.require("non-inverse covector rule fails contraction", !r.contraction.pass);
}

void scalar_transport_laws(Gauge& g) {
  std::mt19937_64 rng(404);
  const auto gen = testing::make_generator(testing::line(2, {-1.0, 1.0}), testing::random_generator(rng, 2));
  const auto fam = family_from_generator(gen);
  const auto full = TensorTransportRule::full(fam);
  const auto f = [](double s) { return 2.0 + std::sin(s); };
  const auto weighted = TensorTransportRule::tensor_product_only(
      2, [fam](double a, double b) { return fam(a, b); },
      [fam](double a, double b) { return Matrix(fam(a, b).inverse().transpose()); }, f);

  double fixed = 0.0, identity = 0.0, cocycle = 0.0, oracle = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double r = uniform(rng, -1, 1), t = uniform(rng, -1, 1), s = uniform(rng, -1, 1);
    const double lambda = uniform(rng, -5, 5);
    fixed = std::max(fixed, std::abs(scalar_transport(full, t, s, lambda) - lambda));
    const auto h = [&](double a, double b) { return scalar_transport(weighted, a, b, 1.0); };
    identity = std::max(identity, std::abs(h(s, s) - 1.0));
    cocycle = std::max(cocycle, std::abs(h(r, t) * h(t, s) - h(r, s)));
    oracle = std::max(oracle, std::abs(h(t, s) - f(s) / f(t)));
  }
  g.at_most("full mode |h(t,s) lambda - lambda|", fixed, 0.0);
  g.at_most("scalar identity", identity, 1e-14);
  g.at_most("scalar cocycle", cocycle, 1e-14);
  g.at_most("h vs f(s)/f(t)", oracle, 1e-14);

  // constancy in both directions: transported <=> the scalar derivation vanishes
  const Interval dom{-1.0, 1.0};
  const auto scalar_derivation = [&](const TensorTransportRule& rule, const std::function<double(double)>& fn,
                                     const std::function<double(double)>& dfn) {
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const double s = -0.9 + 0.18 * k;
      worst = std::max(worst, std::abs(dfn(s) + tensor_coefficients(rule, s).scalar * fn(s)));
    }
    return worst;
  };
  const auto one = [](double) { return 1.0; };
  const auto zero = [](double) { return 0.0; };
  const auto ident = [](double s) { return s; };
  const auto inv_f = [f](double s) { return 1.0 / f(s); };
  const auto d_inv_f = [f](double s) { return -std::cos(s) / (f(s) * f(s)); };
  g.require("full: constant is transported", is_l_transported_scalar(full, dom, one, 1e-12).transported);
  g.at_most("full: derivation of a constant", scalar_derivation(full, one, zero), 1e-8);
  g.require("full: s is not transported", !is_l_transported_scalar(full, dom, ident, 1e-12).transported);
  g.at_least("full: derivation of s", scalar_derivation(full, ident, one), 0.5);
  g.require("weighted: 1/f is transported", is_l_transported_scalar(weighted, dom, inv_f, 1e-12).transported);
  g.at_most("weighted: derivation of 1/f", scalar_derivation(weighted, inv_f, d_inv_f), 1e-8);
  g.require("weighted: constant is not transported", !is_l_transported_scalar(weighted, dom, one, 1e-12).transported);
  g.at_least("weighted: derivation of a constant", scalar_derivation(weighted, one, zero), 0.1);
}

SectionAlongPath random_section(std::mt19937_64& rng, const PathCurve& path, int n) {
  const Vector a = testing::random_vector(rng, n), b = testing::random_vector(rng, n), c = testing::random_vector(rng, n);
  const double w = uniform(rng, 0.5, 2.0);
  return SectionAlongPath(
      path, [=](double s) { return Vector(a + b * std::sin(w * s) + c * s * s); },
      [=](double s) { return Vector(w * b * std::cos(w * s) + 2 * s * c); });
}

void derivation_checks(Gauge& g) {
  std::mt19937_64 rng(505);
  double order_lo = 10.0, order_hi = 0.0, leibniz = 0.0, linearity = 0.0, annihilation = 0.0, apply_zero = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 2;
    const auto path = testing::line(n, {-1.0, 1.0});
    const auto gen = testing::make_generator(path, testing::random_generator(rng, n));
    const auto fam = family_from_generator(gen);
    const auto coef = coefficients_field_from_generator(gen);
    const auto s1 = random_section(rng, path, n), s2 = random_section(rng, path, n);
    const double s = uniform(rng, -0.8, 0.8);

    const auto r = derivation_limit_check(fam, coef, s1, s);
    order_lo = std::min(order_lo, r.order);
    order_hi = std::max(order_hi, r.order);

    const double w = uniform(rng, 0.5, 2.0);
    const ScalarFunction f{[w](double x) { return std::cos(w * x) + x; },
                           [w](double x) { return 1.0 - w * std::sin(w * x); }};
    leibniz = std::max(leibniz, leibniz_check(coef, f, s1));

    const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2);
    const SectionAlongPath combo(
        path, [=](double x) { return Vector(a * s1.value(x) + b * s2.value(x)); },
        [=](double x) { return Vector(a * s1.derivative(x) + b * s2.derivative(x)); });
    const auto d1 = derivation_apply(coef, s1), d2 = derivation_apply(coef, s2), dc = derivation_apply(coef, combo);
    for (int j = 0; j <= 10; ++j) {
      const double x = -1.0 + 0.2 * j;
      linearity = std::max(linearity, max_abs(dc(x) - a * d1(x) - b * d2(x)));
    }

    const auto sigma = transported_section(fam, uniform(rng, -1, 1), testing::random_vector(rng, n));
    const auto z = derivation_limit_check(fam, sigma, s, Vector::Zero(n), {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
    for (double d : z.deviations) annihilation = std::max(annihilation, d);
    apply_zero = std::max(apply_zero, max_abs(derivation_apply(coef, sigma)(s)));
  }
  g.within("min first-order slope", order_lo, 1.0, 0.15);
  g.within("max first-order slope", order_hi, 1.0, 0.15);
  g.at_most("Leibniz", leibniz, 1e-9);
  g.at_most("linearity", linearity, 1e-9);
  g.at_most("annihilation quotient, eps 1e-1..1e-6", annihilation, 1e-9);
  g.at_most("annihilation in components", apply_zero, 1e-9);
}

void covariant_decomposition_checks(Gauge& g) {
  std::mt19937_64 rng(606);
  const auto sphere = ConnectionField::unit_sphere();
  double parallel = 0.0, rebuilt = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double th0 = uniform(rng, 1.0, 2.1), amp = uniform(rng, -0.4, 0.4), w = uniform(rng, 0.5, 3.0);
    const double ph0 = uniform(rng, -3, 3), rate = uniform(rng, -2, 2), wob = uniform(rng, -0.5, 0.5);
    const auto path = PathCurve::closed_form(
        Chart::unit_sphere(), {0.0, 1.0},
        [=](double s) { return vec2(th0 + amp * std::sin(w * s), ph0 + rate * s + wob * std::cos(s)); },
        [=](double s) { return vec2(amp * w * std::cos(w * s), rate - wob * std::sin(s)); });
    const auto hv = covariant_decomposition(parallel_transport_coefficients(sphere, path), sphere);
    for (int j = 0; j <= 10; ++j) parallel = std::max(parallel, max_abs(hv(0.1 * j)));

    const Matrix m0 = testing::random_matrix(rng, 2), m1 = testing::random_matrix(rng, 2);
    const CoefficientField coef(path, [m0, m1](double s) { return Matrix(m0 + std::sin(s) * m1); });
    const auto hv_generic = covariant_decomposition(coef, sphere);
    for (int j = 0; j < 3; ++j) {
      const auto sec = random_section(rng, path, 2);
      const auto direct = derivation_apply(coef, sec);
      const auto via = reconstructed_derivation(sphere, hv_generic, sec);
      for (int i = 0; i <= 10; ++i) rebuilt = std::max(rebuilt, max_abs(direct(0.1 * i) - via(0.1 * i)));
    }
  }
  g.at_most("parallel transport |H_V| on 10 sphere paths", parallel, 1e-10);
  g.at_most("reconstruction vs derivation", rebuilt, 1e-8);
}

void section_equivalence(Gauge& g) {
  std::mt19937_64 rng(707);
  double ode_vs_matrix = 0.0, base_ode = 0.0, base_matrix = 0.0;
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(-1.0 + 0.1 * k);
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + k % 3;
    const auto gen = testing::make_generator(testing::line(n, {-1.0, 1.0}), testing::random_generator(rng, n));
    const auto fam = family_from_generator(gen);
    const auto coef = coefficients_field_from_generator(gen);
    const Vector u = testing::random_vector(rng, n);
    const double s0 = uniform(rng, -1, 1);
    const auto sol = solve_transport_equation(coef, u, s0, grid, {1e-3});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ode_vs_matrix = std::max(ode_vs_matrix, max_abs(sol.values[i] - transport_vector(fam, grid[i], s0, u)));
    }
    const std::size_t m = 3 + static_cast<std::size_t>(k) % 15;
    const auto moved = solve_transport_equation(coef, sol.values[m], grid[m], grid, {1e-3});
    const auto a = transported_section(fam, s0, u);
    const auto b = transported_section(fam, grid[m], transport_vector(fam, grid[m], s0, u));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      base_ode = std::max(base_ode, max_abs(moved.values[i] - sol.values[i]));
      base_matrix = std::max(base_matrix, max_abs(a.value(grid[i]) - b.value(grid[i])));
    }
  }
  g.at_most("ODE section vs matrix transport", ode_vs_matrix, 1e-7);
  g.at_most("base point change (ODE)", base_ode, 1e-9);
  g.at_most("base point change (matrix)", base_matrix, 1e-9);
}

void special_frames(Gauge& g) {
  std::mt19937_64 rng(808);
  double identity = 0.0, constancy = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + k % 3;
    const auto gen = testing::make_generator(testing::line(n, {-1.0, 1.0}), testing::random_generator(rng, n));
    const auto fam = family_from_generator(gen);
    const auto frame = special_frame(gen);
    const auto re = change_transport_frame(fam, [frame](double s) { return frame.basis(s); });
    const Matrix id = Matrix::Identity(n, n);
    for (int j = 0; j < 20; ++j) identity = std::max(identity, max_abs(re(uniform(rng, -1, 1), uniform(rng, -1, 1)) - id));
    const auto sigma = transported_section(fam, uniform(rng, -1, 1), testing::random_vector(rng, n));
    const Vector u0 = frame.basis(-1.0).inverse() * sigma.value(-1.0);
    for (int j = 0; j <= 20; ++j) {
      const double s = -1.0 + 0.1 * j;
      constancy = std::max(constancy, max_abs(frame.basis(s).inverse() * sigma.value(s) - u0));
    }
  }
  g.at_most("re-expressed H vs identity", identity, 1e-8);
  g.at_most("components of transported sections", constancy, 1e-8);
}

Vector great_circle(double a, double b, double s) {
  const double x = std::cos(s), y = b * std::sin(s), z = -a * std::sin(s);
  return vec2(std::acos(z), std::atan2(y, x));
}

void geodesic_recovery(Gauge& g) {
  const auto provider = geodesic_provider(ConnectionField::unit_sphere());
  const LPathProblem equator{Chart::unit_sphere(), provider, vec2(pi / 2, 0), vec2(0, 1), 0.0, {0.0, pi / 2}};
  const auto sol = solve_lpath(equator, {1e-3});
  g.at_most("equator endpoint error", max_abs(sol.samples.back().x - vec2(pi / 2, pi / 2)), 1e-6);

  const double a = 0.5, b = std::sqrt(0.75);
  const LPathProblem tilted{Chart::unit_sphere(), provider, vec2(pi / 2, 0), vec2(a, b), 0.0, {0.0, 1.0}};
  const Vector exact = great_circle(a, b, 1.0);
  const double e1 = max_abs(solve_lpath(tilted, {0.1}).samples.back().x - exact);
  const double e2 = max_abs(solve_lpath(tilted, {0.05}).samples.back().x - exact);
  g.at_least("step halving error ratio (tilted great circle)", e1 / e2, 12.0);
}

void non_connection_lpath(Gauge& g) {
  const Matrix j = (Matrix(2, 2) << 0, -1, 1, 0).finished();
  const LPathProblem pb{Chart::euclidean(2), [j](double, const Vector&, const Vector&) { return j; }, vec2(0, 0),
                        vec2(1, 0), 0.0, {0.0, 3.0}};
  const auto sol = solve_lpath(pb, {1e-3});
  double worst = 0.0;
  for (const auto& p : sol.samples) {
    worst = std::max(worst, max_abs(p.x - vec2(std::sin(p.s), std::cos(p.s) - 1)));
    worst = std::max(worst, max_abs(p.v - vec2(std::cos(p.s), -std::sin(p.s))));
  }
  g.at_most("circle vs closed form", worst, 1e-7);
  const TransportGenerator gen(testing::line(2, pb.domain), [](double s) { return testing::rotation(s); });
  g.at_most("frame components of the velocity", special_frame_linearity(sol, gen).max_deviation, 1e-7);
}

void latitude_holonomy(Gauge& g) {
  const double th0 = pi / 4;
  const auto loop = PathCurve::closed_form(
      Chart::unit_sphere(), {0.0, 2 * pi}, [th0](double s) { return vec2(th0, s); }, [](double) { return vec2(0, 1); });
  const auto coef = parallel_transport_coefficients(ConnectionField::unit_sphere(), loop);
  const Matrix h = holonomy(family_from_coefficients(coef, {1e-3}), loop);
  // orthonormal frame (e_θ, e_φ / sinθ)
  const Matrix d = testing::diag2(1.0, std::sin(th0));
  const Matrix r = d * h * d.inverse();
  double angle = std::atan2(r(1, 0), r(0, 0));
  if (angle < 0) angle += 2 * pi;
  g.at_most("orthogonality of the holonomy", max_abs(r.transpose() * r - Matrix::Identity(2, 2)), 1e-6);
  g.within("rotation angle", angle, 2 * pi * (1 - std::cos(th0)), 1e-5);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void cli_determinism(Gauge& g) {
  std::vector<fs::path> scenes;
  for (const auto& e : fs::directory_iterator(PATHLIFT_SCENE_DIR)) scenes.push_back(e.path());
  std::sort(scenes.begin(), scenes.end());

  int round_trips = 0;
  for (const auto& p : scenes) {
    const Scene scene = parse_scene(slurp(p));
    const bool text = parse_scene(serialize_scene(scene, SceneEncoding::Text)) == scene;
    const bool json = parse_scene(serialize_scene(scene, SceneEncoding::Json)) == scene;
    if (text && json) ++round_trips;
    else g.require("round trip of " + p.filename().string(), false);
  }
  g.at_least("scenes with AST-equal round trips", round_trips, 10);

  int identical = 0, runs = 0;
  for (const std::string cmd : {"transport", "solve-section", "lpath", "frame", "holonomy", "check"}) {
    int succeeded = 0;
    for (const auto& p : scenes) {
      std::ostringstream o1, e1, o2, e2;
      const int c1 = cli::run({cmd, "--scene", p.string()}, o1, e1, 42);
      const int c2 = cli::run({cmd, "--scene", p.string()}, o2, e2, 42);
      ++runs;
      if (c1 == c2 && o1.str() == o2.str() && e1.str() == e2.str()) ++identical;
      else g.require(cmd + " on " + p.filename().string() + " is reproducible", false);
      if (c1 == 0) ++succeeded;
    }
    g.require(cmd + " succeeds on some scene", succeeded > 0);
  }
  g.require(std::to_string(identical) + "/" + std::to_string(runs) + " runs byte-identical", identical == runs);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "cocycle and identity", 5.0, cocycle_and_identity},
      {2, "representation round trip", 5.0, representation_round_trip},
      {3, "tensor laws", 10.0, tensor_laws},
      {4, "scalar transport", 0.0, scalar_transport_laws},
      {5, "derivation checks", 0.0, derivation_checks},
      {6, "covariant decomposition", 0.0, covariant_decomposition_checks},
      {7, "section transport equivalence", 0.0, section_equivalence},
      {8, "special frames", 0.0, special_frames},
      {9, "geodesic recovery", 2.0, geodesic_recovery},
      {10, "non-connection L-path", 0.0, non_connection_lpath},
      {11, "sphere latitude holonomy", 0.0, latitude_holonomy},
      {12, "CLI determinism and scene round trip", 0.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Gauge g;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(g);
    } catch (const std::exception& e) {
      g.require(std::string("threw: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0) g.at_most("runtime s", secs, c.time_limit);
    std::cout << (g.ok() ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << g.detail();
    if (c.time_limit <= 0) std::cout << std::setprecision(3) << "; runtime " << secs << " s";
    std::cout << "\n";
    if (!g.ok()) ++failures;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
