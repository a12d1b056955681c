#include "pgnnff/lip.hpp"

#include "pgnnff/linalg.hpp"

namespace pgnnff {

Mat basis_matrix(const Dataset& data, const BasisMap& map,
                 const RegressorSpec& spec, long stride) {
  if (stride < 1) stride = 1;
  const SampleRange r = valid_sample_range(spec, data.size());
  const long rows = (r.count() + stride - 1) / stride;
  Mat out(rows, map.n_out);
  long k = 0;
  for (long t = r.t_min; t <= r.t_max; t += stride)
    out.row(k++) = eval_basis(map, build_regressor(data, t, spec)).transpose();
  return out;
}

Vec input_vector(const Dataset& data, const RegressorSpec& spec, long stride) {
  if (stride < 1) stride = 1;
  const SampleRange r = valid_sample_range(spec, data.size());
  const long rows = (r.count() + stride - 1) / stride;
  Vec out(rows);
  long k = 0;
  for (long t = r.t_min; t <= r.t_max; t += stride) out[k++] = data.u[t];
  return out;
}

Mat gram_matrix(const Dataset& data, const BasisMap& map,
                const RegressorSpec& spec) {
  const SampleRange r = valid_sample_range(spec, data.size());
  Mat m = Mat::Zero(map.n_out, map.n_out);
  for (long t = r.t_min; t <= r.t_max; ++t) {
    const Vec v = eval_basis(map, build_regressor(data, t, spec));
    m.noalias() += v * v.transpose();
  }
  m /= static_cast<double>(r.count());
  m = (0.5 * (m + m.transpose())).eval();
  return m;
}

LipParams fit_lip(const Dataset& data, const BasisMap& map,
                  const RegressorSpec& spec) {
  const SampleRange r = valid_sample_range(spec, data.size());
  const Mat m = gram_matrix(data, map, spec);
  Vec b = Vec::Zero(map.n_out);
  for (long t = r.t_min; t <= r.t_max; ++t)
    b += eval_basis(map, build_regressor(data, t, spec)) * data.u[t];
  b /= static_cast<double>(r.count());
  return LipParams{solve_spd(m, b, 1e-12, "fit_lip")};
}

double lip_predict(const LipParams& lip, const BasisMap& map,
                   const Regressor& phi) {
  const Vec v = eval_basis(map, phi);
  if (v.size() != lip.theta.size())
    throw NumericalError("lip_predict: parameter/basis dimension mismatch");
  return lip.theta.dot(v);
}

double correlation(std::span<const double> xa, std::span<const double> xb) {
  if (xa.size() != xb.size() || xa.empty())
    throw NumericalError("correlation: sequences must have equal length >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) acc += xa[i] * xb[i];
  return acc / static_cast<double>(xa.size());
}

std::vector<double> unmodelled_residual(const Dataset& data,
                                        const LipParams& lip,
                                        const BasisMap& map,
                                        const RegressorSpec& spec) {
  if (lip.theta.size() != map.n_out)
    throw NumericalError("unmodelled_residual: dimension mismatch");
  const SampleRange r = valid_sample_range(spec, data.size());
  std::vector<double> f;
  f.reserve(r.count());
  for (long t = r.t_min; t <= r.t_max; ++t)
    f.push_back(data.u[t] -
                lip_predict(lip, map, build_regressor(data, t, spec)));
  return f;
}

}  // namespace pgnnff
