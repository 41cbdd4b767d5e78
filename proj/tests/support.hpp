#pragma once

#include "pathlift/geometry.hpp"
#include "pathlift/transport.hpp"

#include <cmath>
#include <random>

namespace testing {

using pathlift::Chart;
using pathlift::Interval;
using pathlift::Matrix;
using pathlift::PathCurve;
using pathlift::Vector;

inline PathCurve line(int dim, Interval domain) {
  return PathCurve::closed_form(
      Chart::euclidean(dim), domain,
      [dim](double s) {
        Vector x = Vector::Zero(dim);
        x[0] = s;
        return x;
      },
      [dim](double) {
        Vector v = Vector::Zero(dim);
        v[0] = 1.0;
        return v;
      });
}

inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Matrix rotation(double a) {
  Matrix m(2, 2);
  m << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return m;
}

inline Matrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// F(s) = (I + A s + B sin(ωs)) with small A, B so F stays invertible on
// [-1, 1], and its exact derivative.
struct SmoothGenerator {
  Matrix a, b;
  double w;
  Matrix value(double s) const {
    return Matrix::Identity(a.rows(), a.cols()) + a * s + b * std::sin(w * s);
  }
  Matrix derivative(double s) const { return a + b * w * std::cos(w * s); }
};

inline SmoothGenerator random_generator(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return {random_matrix(rng, n, 0.25 / n), random_matrix(rng, n, 0.25 / n), u(rng)};
}

inline pathlift::TransportGenerator make_generator(const PathCurve& path, const SmoothGenerator& g) {
  return pathlift::TransportGenerator(
      path, [g](double s) { return g.value(s); }, [g](double s) { return g.derivative(s); });
}

}  // namespace testing
