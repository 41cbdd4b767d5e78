#include "pathlift/derivation.hpp"
#include "pathlift/errors.hpp"

#include "support.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace pathlift;
using testing::diag2;
using testing::line;

namespace {

constexpr double pi = std::numbers::pi;

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

SectionAlongPath constant_section(const PathCurve& p, const Vector& c) {
  return SectionAlongPath(p, [c](double) { return c; }, [c](double) { return Vector(Vector::Zero(c.size())); });
}

CoefficientField diag_coefficients(const PathCurve& p) {
  return CoefficientField(p, [](double) { return diag2(1.0, 2.0); });
}

TransportMatrixFamily diag_family(const PathCurve& p) {
  return TransportMatrixFamily(
      p, [](double t, double s) { return diag2(std::exp(s - t), std::exp(2 * (s - t))); }, Provenance::ClosedForm);
}

}  // namespace

TEST_CASE("derivation in components") {
  const auto p = line(2, {0.0, 1.0});
  const CoefficientField zero(p, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  CHECK(derivation_apply(zero, constant_section(p, vec2(3, -1)))(0.4) == Vector::Zero(2));

  const auto coef = diag_coefficients(p);
  const SectionAlongPath decaying(
      p, [](double s) { return vec2(std::exp(-s), std::exp(-2 * s)); },
      [](double s) { return vec2(-std::exp(-s), -2 * std::exp(-2 * s)); });
  CHECK(max_abs(derivation_apply(coef, decaying)(0.7)) <= 1e-15);

  const auto ones = constant_section(p, vec2(1, 1));
  CHECK(derivation_apply(coef, ones)(0.3) == vec2(1, 2));
  // limit definition at ε = 1e-6
  const auto report = derivation_limit_check(diag_family(p), ones, 0.3, vec2(1, 2), {1e-6});
  CHECK(report.deviations[0] <= 1e-5);

  const SectionAlongPath rough(p, [](double s) { return vec2(std::abs(s - 0.5), 0); }, std::nullopt, false);
  CHECK_THROWS_AS(derivation_apply(coef, rough), ValidationError);
  CHECK_THROWS_AS(derivation_apply(coef, constant_section(line(2, {0.0, 2.0}), vec2(1, 1))), ValidationError);
}

TEST_CASE("difference quotient converges at first order") {
  const auto p = line(2, {0.0, 1.0});
  const CoefficientField zero(p, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  const TransportMatrixFamily identity(p, [](double, double) { return Matrix(Matrix::Identity(2, 2)); },
                                       Provenance::ClosedForm);
  const auto flat = derivation_limit_check(identity, zero, constant_section(p, vec2(2, 5)), 0.5);
  for (const auto& q : flat.quotients) CHECK(q == Vector::Zero(2));

  const auto coef = diag_coefficients(p);
  const auto fam = diag_family(p);
  const auto r = derivation_limit_check(fam, coef, constant_section(p, vec2(1, 1)), 0.3);
  REQUIRE(r.deviations.size() == 3);
  CHECK(r.deviations[0] > r.deviations[1]);
  CHECK(r.deviations[1] > r.deviations[2]);
  CHECK(r.order == doctest::Approx(1.0).epsilon(0.05));
  // near the right end the quotient looks backwards
  const auto end = derivation_limit_check(fam, coef, constant_section(p, vec2(1, 1)), 1.0);
  CHECK(end.deviations.back() <= 1e-3);
}

TEST_CASE("transported sections are annihilated") {
  const auto p = line(2, {0.0, 1.0});
  const auto fam = diag_family(p);
  const auto coef = diag_coefficients(p);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 5; ++k) {
    const auto sigma = transported_section(fam, 0.2, testing::random_vector(rng, 2));
    const auto r = derivation_limit_check(fam, sigma, 0.6, Vector::Zero(2));
    for (double d : r.deviations) CHECK(d <= 1e-9);
    CHECK(max_abs(derivation_apply(coef, sigma)(0.6)) <= 1e-8);
  }
}

TEST_CASE("Leibniz rule") {
  const auto p = line(2, {0.0, 1.0});
  const CoefficientField zero(p, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  const auto sigma = constant_section(p, vec2(1, -2));
  const ScalarFunction one{[](double) { return 1.0; }, [](double) { return 0.0; }};
  CHECK(leibniz_check(diag_coefficients(p), one, sigma) == 0.0);

  const ScalarFunction id{[](double s) { return s; }, [](double) { return 1.0; }};
  const SectionAlongPath scaled(p, [](double s) { return vec2(s, -2 * s); }, [](double) { return vec2(1, -2); });
  CHECK(derivation_apply(zero, scaled)(0.25) == sigma.value(0.25));
  CHECK(leibniz_check(zero, id, sigma) == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const ScalarFunction poly{[=](double s) { return a + b * s + c * s * s * s; },
                              [=](double s) { return b + 3 * c * s * s; }};
    const Vector x = testing::random_vector(rng, 2), y = testing::random_vector(rng, 2);
    const SectionAlongPath sec(p, [x, y](double s) { return Vector(x + std::sin(s) * y); },
                               [y](double s) { return Vector(std::cos(s) * y); });
    CHECK(leibniz_check(diag_coefficients(p), poly, sec) <= 1e-9);
    // the finite-difference derivative path as well
    const ScalarFunction no_derivative{poly.value, nullptr};
    const SectionAlongPath fd(p, [x, y](double s) { return Vector(x + std::sin(s) * y); });
    CHECK(leibniz_check(diag_coefficients(p), no_derivative, fd) <= 1e-8);
  }
}

TEST_CASE("transport equation") {
  const auto p = line(2, {0.0, 1.0});
  std::vector<double> grid;
  for (int k = 0; k < 20; ++k) grid.push_back(k / 19.0);

  const CoefficientField zero(p, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  const auto still = solve_transport_equation(zero, vec2(3, 4), 0.5, grid);
  for (const auto& v : still.values) CHECK(v == vec2(3, 4));

  const auto diag = solve_transport_equation(diag_coefficients(p), vec2(1, 1), 0.0, grid);
  CHECK(max_abs(diag.values.back() - vec2(std::exp(-1.0), std::exp(-2.0))) <= 1e-8);
  CHECK(max_abs(diag.section.value(1.0) - vec2(std::exp(-1.0), std::exp(-2.0))) <= 1e-8);

  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const auto path = line(n, {-1.0, 1.0});
    const auto gen = testing::make_generator(path, testing::random_generator(rng, n));
    const auto coef = coefficients_field_from_generator(gen);
    const auto fam = family_from_generator(gen);
    const Vector s0v = testing::random_vector(rng, n);
    std::vector<double> g;
    for (int k = 0; k < 20; ++k) g.push_back(-1.0 + 2.0 * k / 19.0);
    const auto sol = solve_transport_equation(coef, s0v, 0.1, g);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      worst = std::max(worst, max_abs(sol.values[k] - transport_vector(fam, g[k], 0.1, s0v)));
    }
    CHECK(worst <= 1e-7);
    CHECK(is_l_transported(fam, sol.section, 1e-7).transported);

    // a solution started from any of its own values is the same section
    const auto again = solve_transport_equation(coef, sol.values[15], g[15], g);
    double gap = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) gap = std::max(gap, max_abs(again.values[k] - sol.values[k]));
    CHECK(gap <= 1e-9);
  }
  CHECK_THROWS_AS(solve_transport_equation(zero, vec2(1, 1), 2.0, grid), ValidationError);
  CHECK_THROWS_AS(solve_transport_equation(zero, vec2(1, 1), 0.0, {1.5}), ValidationError);
}

TEST_CASE("L-transported sections") {
  const auto p = line(2, {0.0, 1.0});
  const auto fam = diag_family(p);
  const auto constant = is_l_transported(fam, constant_section(p, vec2(1, 1)), 1e-8);
  CHECK_FALSE(constant.transported);
  CHECK(constant.max_deviation >= 1 - std::exp(-1.0));

  const auto rule = TensorTransportRule::full(fam);
  CHECK(is_l_transported_scalar(rule, p.domain(), [](double) { return 2.5; }, 1e-12).transported);
  CHECK_FALSE(is_l_transported_scalar(rule, p.domain(), [](double s) { return s; }, 1e-12).transported);

  // in a tensor-product-only rule the transported scalars are 1/f
  const auto weighted = TensorTransportRule::tensor_product_only(
      2, [fam](double t, double s) { return fam(t, s); },
      [fam](double t, double s) { return Matrix(fam(t, s).inverse().transpose()); },
      [](double s) { return 1.0 + s; });
  CHECK(is_l_transported_scalar(weighted, p.domain(), [](double s) { return 1.0 / (1.0 + s); }, 1e-12).transported);
  CHECK_FALSE(is_l_transported_scalar(weighted, p.domain(), [](double) { return 1.0; }, 1e-12).transported);
}

TEST_CASE("components are constant in a special frame") {
  const auto p = line(2, {0.0, 1.0});
  const TransportGenerator gen(p, [](double s) { return Matrix(diag2(std::exp(s), std::exp(2 * s)) * testing::rotation(s)); });
  const auto fam = family_from_generator(gen);
  const auto frame = special_frame(gen);
  const auto sigma = transported_section(fam, 0.3, vec2(0.2, -0.7));
  const Vector u0 = frame.basis(0.0).inverse() * sigma.value(0.0);
  for (int k = 1; k <= 10; ++k) {
    const double s = k / 10.0;
    CHECK(max_abs(frame.basis(s).inverse() * sigma.value(s) - u0) <= 1e-8);
  }
}

TEST_CASE("covariant decomposition") {
  const auto sphere = ConnectionField::unit_sphere();
  const auto path = PathCurve::closed_form(
      Chart::unit_sphere(), {0.0, 1.0}, [](double s) { return vec2(1.0 + 0.3 * s * s, 2 * s); },
      [](double s) { return vec2(0.6 * s, 2.0); });
  const auto parallel = parallel_transport_coefficients(sphere, path);
  const auto hv = covariant_decomposition(parallel, sphere);
  for (double s : {0.0, 0.5, 1.0}) CHECK(max_abs(hv(s)) <= 1e-15);

  const auto flat_line = line(2, {0.0, 1.0});
  const auto hv_flat = covariant_decomposition(diag_coefficients(flat_line), ConnectionField::flat(2));
  CHECK(hv_flat(0.5) == diag2(1, 2));

  // equator, zero transport coefficients: H_V = −Γ^i_{jk} γ̇^k
  const auto equator = PathCurve::closed_form(Chart::unit_sphere(), {0.0, 1.0},
                                              [](double s) { return vec2(pi / 2, s); },
                                              [](double) { return vec2(0, 1); });
  const CoefficientField zero(equator, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  const auto hv_eq = covariant_decomposition(zero, sphere);
  Matrix oracle(2, 2);
  // Γ^θ_{φφ} = −sin cos = 0 at the equator, Γ^φ_{θφ} = cot = 0 as well
  oracle << 0.0, std::sin(pi / 2) * std::cos(pi / 2), -std::cos(pi / 2) / std::sin(pi / 2), 0.0;
  CHECK(max_abs(hv_eq(0.4) - oracle) <= 1e-15);

  // off the equator the entries are nonzero
  const auto tilted = PathCurve::closed_form(Chart::unit_sphere(), {0.0, 1.0},
                                             [](double s) { return vec2(1.0, s); }, [](double) { return vec2(0, 1); });
  const CoefficientField zero_t(tilted, [](double) { return Matrix(Matrix::Zero(2, 2)); });
  Matrix oracle_t(2, 2);
  oracle_t << 0.0, std::sin(1.0) * std::cos(1.0), -std::cos(1.0) / std::sin(1.0), 0.0;
  CHECK(max_abs(covariant_decomposition(zero_t, sphere)(0.4) - oracle_t) <= 1e-15);

  // reconstruction ∇_V + H_V reproduces the derivation for a generic transport
  std::mt19937_64 rng(5);
  const Matrix m0 = testing::random_matrix(rng, 2), m1 = testing::random_matrix(rng, 2);
  const CoefficientField coef(path, [m0, m1](double s) { return Matrix(m0 + s * m1); });
  const auto hv_generic = covariant_decomposition(coef, sphere);
  for (int k = 0; k < 5; ++k) {
    const Vector a = testing::random_vector(rng, 2), b = testing::random_vector(rng, 2);
    const SectionAlongPath sec(path, [a, b](double s) { return Vector(a + s * s * b); },
                               [b](double s) { return Vector(2 * s * b); });
    const auto direct = derivation_apply(coef, sec);
    const auto rebuilt = reconstructed_derivation(sphere, hv_generic, sec);
    for (double s : {0.1, 0.55, 0.9}) CHECK(max_abs(direct(s) - rebuilt(s)) <= 1e-8);
  }

  // cross-check: ∂H(t,s)/∂s at t = s by differences equals Γ_γ
  const auto gen = generator_from_family(family_from_coefficients(coef), 0.0);
  const auto fam = family_from_generator(gen);
  const double h = 1e-4, s = 0.5;
  const Matrix dh = (fam(s, s + h) - fam(s, s - h)) / (2 * h);
  CHECK(max_abs(dh - coef(s)) <= 1e-6);
}

TEST_CASE("tensor derivations") {
  std::mt19937_64 rng(8);
  const auto p = line(2, {0.0, 1.0});
  const auto gen = testing::make_generator(p, testing::random_generator(rng, 2));
  const auto fam = family_from_generator(gen);
  const auto rule = TensorTransportRule::full(fam);
  const double s = 0.4;
  const Matrix gamma = coefficients_from_generator(gen, s);
  const auto exact = tensor_coefficients(gamma);
  const auto numeric = tensor_coefficients(rule, s);
  CHECK(max_abs(numeric.vector - exact.vector) <= 1e-8);
  CHECK(max_abs(numeric.covector - exact.covector) <= 1e-8);
  CHECK(std::abs(numeric.scalar) <= 1e-8);
  CHECK(max_abs(exact.covector + gamma.transpose()) == 0.0);

  auto field = [&rng](int p_, int q_) {
    std::vector<double> a, b;
    std::uniform_real_distribution<double> u(-1, 1);
    const std::size_t n = static_cast<std::size_t>(std::pow(2, p_ + q_));
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(u(rng));
      b.push_back(u(rng));
    }
    return TensorSection{[=](double t) {
                           std::vector<double> c(n);
                           for (std::size_t i = 0; i < n; ++i) c[i] = a[i] + b[i] * std::sin(t);
                           return TensorComponents(p_, q_, 2, t, c);
                         },
                         [=](double t) {
                           std::vector<double> c(n);
                           for (std::size_t i = 0; i < n; ++i) c[i] = b[i] * std::cos(t);
                           return TensorComponents(p_, q_, 2, t, c);
                         }};
  };
  const auto A = field(1, 1);
  const auto B = field(1, 0);
  const TensorSection AB{[A, B](double t) { return tensor_product(A.value(t), B.value(t)); }, nullptr};
  const auto lhs = tensor_derivation_apply(exact, AB, s);
  const auto rhs_a = tensor_product(tensor_derivation_apply(exact, A, s), B.value(s));
  const auto rhs_b = tensor_product(A.value(s), tensor_derivation_apply(exact, B, s));
  auto rhs = rhs_a;
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs.components()[i] += rhs_b.components()[i];
  CHECK(max_deviation(lhs, rhs) <= 1e-9);

  const TensorSection CA{[A](double t) { return contract(A.value(t), 0, 0); },
                         [A](double t) { return contract(A.derivative(t), 0, 0); }};
  const auto dc = tensor_derivation_apply(exact, CA, s);
  const auto cd = contract(tensor_derivation_apply(exact, A, s), 0, 0);
  CHECK(max_deviation(dc, cd) <= 1e-12);
}
