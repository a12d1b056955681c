#pragma once

#include <span>

#include "pgnnff/basis.hpp"
#include "pgnnff/types.hpp"

namespace pgnnff {

/// Row t - t_min holds T_phy(phi(t))^T for t over valid_sample_range,
/// decimated by `stride` (>= 1).
Mat basis_matrix(const Dataset& data, const BasisMap& map,
                 const RegressorSpec& spec, long stride = 1);

/// u(t) over the same index set as basis_matrix.
Vec input_vector(const Dataset& data, const RegressorSpec& spec,
                 long stride = 1);

/// M = (1/N) sum_t T_phy(phi(t)) T_phy(phi(t))^T, symmetrized after
/// accumulation. Throws when fewer valid samples than basis dimensions.
Mat gram_matrix(const Dataset& data, const BasisMap& map,
                const RegressorSpec& spec);

/// Closed-form LIP identification: theta = M^-1 [(1/N) sum T_phy(phi(t)) u(t)].
/// Throws NumericalError when rcond(M) < 1e-12 (insufficient excitation).
LipParams fit_lip(const Dataset& data, const BasisMap& map,
                  const RegressorSpec& spec);

double lip_predict(const LipParams& lip, const BasisMap& map,
                   const Regressor& phi);

/// (1/N) sum_t xa(t) xb(t); zero means uncorrelated.
double correlation(std::span<const double> xa, std::span<const double> xb);

/// f(phi(t)) = u(t) - theta^T T_phy(phi(t)) over the valid range.
std::vector<double> unmodelled_residual(const Dataset& data,
                                        const LipParams& lip,
                                        const BasisMap& map,
                                        const RegressorSpec& spec);

}  // namespace pgnnff
