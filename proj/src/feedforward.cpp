#include "pgnnff/feedforward.hpp"

#include <cmath>

namespace pgnnff {

Regressor ff_regressor(const ReferenceProfile& reference,
                       const std::vector<double>& uff_history, long t,
                       const RegressorSpec& spec) {
  const long n = reference.size();
  Regressor reg;
  reg.t = t;
  reg.phi.resize(spec.length());
  long k = 0;
  for (long i = t + spec.n_a; i >= t - spec.n_b; --i) {
    const long j = std::min(std::max(i, 0L), n - 1);
    reg.phi[k++] = reference.r[j];
  }
  for (long i = t - 1; i >= t - spec.n_c; --i)
    reg.phi[k++] =
        (i >= 0 && i < static_cast<long>(uff_history.size()))
            ? uff_history[i]
            : 0.0;
  return reg;
}

std::vector<double> generate_ff(const Model& model, const BasisMap& map,
                                const RegressorSpec& spec,
                                const ReferenceProfile& reference) {
  const long n = reference.size();
  if (n < spec.length())
    throw ConfigError("generate_ff: reference shorter than regressor window");

  // Input lags are zero-padded, so the recursion starts as soon as the
  // reference window is in range.
  const long t_first = spec.n_b;
  const long t_last = n - 1 - spec.n_a;
  if (t_first > t_last)
    throw ConfigError("generate_ff: no valid sample index for this spec");

  std::vector<double> uff(n, 0.0);
  for (long t = t_first; t <= t_last; ++t) {
    const double v = model_predict(model, map, ff_regressor(reference, uff, t, spec));
    if (!std::isfinite(v))
      throw NumericalError(
          "generate_ff: non-finite feedforward at t=" + std::to_string(t) +
          " (unstable inverse model)");
    uff[t] = v;
  }
  for (long t = 0; t < t_first; ++t) uff[t] = uff[t_first];
  for (long t = t_last + 1; t < n; ++t) uff[t] = uff[t_last];
  return uff;
}

}  // namespace pgnnff
