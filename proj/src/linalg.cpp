#include "pathlift/linalg.hpp"

#include "pathlift/errors.hpp"

#include <cmath>
#include <string>

namespace pathlift {

namespace {

Eigen::PartialPivLU<Matrix> factor(const Matrix& m, double cond_cap, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": expected a nonempty square matrix");
  }
  if (!all_finite(m)) {
    throw NumericalError(std::string(what) + ": matrix has non-finite entries");
  }
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = (lu.matrixLU().diagonal().array() == 0.0).any() ? 0.0 : lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > cond_cap) {
    throw NumericalError(std::string(what) + ": matrix is singular or ill-conditioned (cond ~ " +
                         std::to_string(rcond > 0.0 ? 1.0 / rcond : INFINITY) + ")");
  }
  return lu;
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix checked_inverse(const Matrix& m, double cond_cap, std::string_view what) {
  return factor(m, cond_cap, what).inverse();
}

void require_invertible(const Matrix& m, double cond_cap, std::string_view what) { factor(m, cond_cap, what); }

Matrix checked_solve(const Matrix& m, const Matrix& rhs, double cond_cap, std::string_view what) {
  if (rhs.rows() != m.rows()) {
    throw ValidationError(std::string(what) + ": right-hand side has wrong row count");
  }
  return factor(m, cond_cap, what).solve(rhs);
}

}  // namespace pathlift
