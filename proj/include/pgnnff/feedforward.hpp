#pragma once

#include <vector>

#include "pgnnff/model.hpp"
#include "pgnnff/trajectory.hpp"

namespace pgnnff {

/// Reference-based analog of build_regressor with u replaced by generated
/// feedforward values: phi_ff(t) = [r(t+n_a),...,r(t-n_b),
/// u_ff(t-1),...,u_ff(t-n_c)]. History before t = 0 is zero; out-of-range
/// reference indices clamp to the first/last sample.
Regressor ff_regressor(const ReferenceProfile& reference,
                       const std::vector<double>& uff_history, long t,
                       const RegressorSpec& spec);

/// Feedforward force sequence u_ff(t) = u_hat(theta, phi_ff(t)), computed
/// causally so input lags consume previously generated values. The first
/// n_b samples hold the first valid output and the final n_a samples hold
/// the last valid one (the reference starts and ends at rest). For the CLM
/// (n_c = 0) the recursion degenerates to pointwise evaluation. Aborts on a
/// non-finite output (unstable inverse).
std::vector<double> generate_ff(const Model& model, const BasisMap& map,
                                const RegressorSpec& spec,
                                const ReferenceProfile& reference);

}  // namespace pgnnff
