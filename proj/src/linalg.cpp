#include "pgnnff/linalg.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace pgnnff {

double rcond_symmetric(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues().cwiseAbs();
  const double emax = ev.maxCoeff();
  if (emax == 0.0) return 0.0;
  return ev.minCoeff() / emax;
}

Vec solve_spd(const Mat& a, const Vec& b, double rcond_min,
              const std::string& context) {
  const long n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw NumericalError(context + ": dimension mismatch in solve");

  // Equilibrate to unit diagonal: As = D A D with D = diag(1/sqrt(a_ii)).
  // Conditioning is judged after equilibration; basis features legitimately
  // span many orders of magnitude, and pure scaling is not rank deficiency.
  Vec d(n);
  for (long i = 0; i < n; ++i)
    d[i] = a(i, i) > 0.0 ? 1.0 / std::sqrt(a(i, i)) : 1.0;
  const Mat as = d.asDiagonal() * a * d.asDiagonal();

  if (rcond_symmetric(as) < rcond_min)
    throw NumericalError(context +
                         ": matrix is singular to working precision "
                         "(insufficient excitation)");

  Eigen::LDLT<Mat> ldlt(as);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError(context + ": LDLT factorization failed");

  Vec x = d.asDiagonal() * ldlt.solve((d.asDiagonal() * b).eval());

  // Iterative refinement on the original system.
  for (int it = 0; it < 3; ++it) {
    const Vec r = b - a * x;
    const double rel = r.norm() / (b.norm() + a.norm() * x.norm() + 1e-300);
    if (rel < 1e-15) break;
    x += d.asDiagonal() * ldlt.solve((d.asDiagonal() * r).eval());
  }
  if (!x.allFinite())
    throw NumericalError(context + ": non-finite solution");
  return x;
}

}  // namespace pgnnff
