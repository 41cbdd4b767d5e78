#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace pathlift {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default cap on the condition number of generator and transport matrices.
inline constexpr double kGeneratorConditionCap = 1e12;
/// Default cap on the condition number of frame basis matrices.
inline constexpr double kFrameConditionCap = 1e8;

/// Inverse via LU with partial pivoting. Throws NumericalError when the
/// estimated condition number exceeds `cond_cap` or the input is not finite.
Matrix checked_inverse(const Matrix& m, double cond_cap, std::string_view what);

/// Throws like checked_inverse without forming the inverse.
void require_invertible(const Matrix& m, double cond_cap, std::string_view what);
/// Solves m x = rhs with the same conditioning rules as checked_inverse.
Matrix checked_solve(const Matrix& m, const Matrix& rhs, double cond_cap, std::string_view what);

/// Largest absolute entry; the max-norm used by all tolerance checks.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool all_finite(const Matrix& m);

}  // namespace pathlift
