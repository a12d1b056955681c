#pragma once

#include "pgnnff/types.hpp"

namespace pgnnff {

/// Reciprocal condition number of a symmetric matrix, min|eig| / max|eig|.
double rcond_symmetric(const Mat& a);

/// Solves A x = b for symmetric positive (semi)definite A via diagonally
/// equilibrated LDLT with iterative refinement. Basis features can span ~12
/// orders of magnitude, so the raw system is equilibrated to unit diagonal
/// before factorization and the solution is refined against the original
/// system until the normal-equation residual is at rounding level.
///
/// Throws NumericalError when rcond(A) falls below rcond_min.
Vec solve_spd(const Mat& a, const Vec& b, double rcond_min,
              const std::string& context);

}  // namespace pgnnff
