#include "pgnnff/types.hpp"

#include <algorithm>
#include <cmath>

namespace pgnnff {

void RegressorSpec::validate() const {
  if (n_a < 0 || n_b < 0 || n_c < 0)
    throw ConfigError("regressor orders n_a, n_b, n_c must be >= 0");
  if (!(ts > 0.0) || !std::isfinite(ts))
    throw ConfigError("sampling time ts must be > 0");
}

void Dataset::validate() const {
  if (u.size() != y.size())
    throw ConfigError("dataset: u and y must have equal length");
  if (u.empty()) throw ConfigError("dataset: empty");
  if (!(ts > 0.0)) throw ConfigError("dataset: ts must be > 0");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(y[i]))
      throw NumericalError("dataset: non-finite sample at index " +
                           std::to_string(i));
  }
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
  return a == Activation::Tanh ? "tanh" : "identity";
}

int NNParams::input_width() const {
  if (layers.empty()) throw ConfigError("NNParams: no layers");
  return static_cast<int>(layers.front().W.cols());
}

int NNParams::last_hidden_width() const {
  if (layers.size() < 2) throw ConfigError("NNParams: no hidden layers");
  return static_cast<int>(layers[layers.size() - 2].W.rows());
}

void NNParams::validate() const {
  if (layers.size() < 2)
    throw ConfigError("NNParams: need at least one hidden layer plus output");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.W.rows() != l.B.size())
      throw ConfigError("NNParams: layer " + std::to_string(i) +
                        " width mismatch between W and B");
    if (i > 0 && layers[i - 1].W.rows() != l.W.cols())
      throw ConfigError("NNParams: layer " + std::to_string(i) +
                        " input width does not chain");
    if (!l.W.allFinite() || !l.B.allFinite())
      throw NumericalError("NNParams: non-finite parameter");
  }
  if (layers.back().W.rows() != 1)
    throw ConfigError("NNParams: output layer must have width 1");
}

Regressor build_regressor(const Dataset& data, long t,
                          const RegressorSpec& spec) {
  const long n = data.size();
  if (t - spec.n_b < 0 || t + spec.n_a > n - 1 || t - spec.n_c < 0)
    throw NumericalError("build_regressor: index out of range at t=" +
                         std::to_string(t));
  Regressor reg;
  reg.t = t;
  reg.phi.resize(spec.length());
  long k = 0;
  for (long i = t + spec.n_a; i >= t - spec.n_b; --i) reg.phi[k++] = data.y[i];
  for (long i = t - 1; i >= t - spec.n_c; --i) reg.phi[k++] = data.u[i];
  return reg;
}

SampleRange valid_sample_range(const RegressorSpec& spec, long n_samples) {
  SampleRange r;
  r.t_min = std::max<long>(spec.n_b, spec.n_c);
  r.t_max = n_samples - 1 - spec.n_a;
  if (r.t_min > r.t_max)
    throw NumericalError("dataset too short for regressor window (N=" +
                         std::to_string(n_samples) + ")");
  return r;
}

}  // namespace pgnnff
