#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pgnnff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy, mapped to CLI exit codes (1/2/3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orders of the nonlinear ARX regressor and the sampling time.
/// Regressor length is n_a + n_b + 1 + n_c: an output window
/// y(t+n_a)..y(t-n_b) plus input lags u(t-1)..u(t-n_c).
struct RegressorSpec {
  int n_a = 0;
  int n_b = 2;
  int n_c = 0;
  double ts = 1e-4;

  int length() const { return n_a + n_b + 1 + n_c; }
  void validate() const;
};

/// Recorded input/output sequences at a fixed sampling time.
struct Dataset {
  std::vector<double> u;  // force [N]
  std::vector<double> y;  // position [m]
  double ts = 1e-4;

  long size() const { return static_cast<long>(u.size()); }
  void validate() const;
};

struct Regressor {
  Vec phi;
  long t = 0;
};

struct LipParams {
  Vec theta;
};

struct NNLayer {
  Mat W;  // rows = layer width, cols = input width
  Vec B;  // length = layer width
};

enum class Activation { Tanh, Identity };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Fixed-topology MLP parameters: l hidden layers plus a width-1 output layer.
struct NNParams {
  std::vector<NNLayer> layers;
  Activation activation = Activation::Tanh;

  int input_width() const;
  int hidden_layer_count() const { return static_cast<int>(layers.size()) - 1; }
  int last_hidden_width() const;
  void validate() const;
};

/// Parallel physical layer + neural net, identified as one model.
struct PGNNParams {
  NNParams nn;
  Vec theta_phy;
};

struct SampleRange {
  long t_min = 0;
  long t_max = -1;
  long count() const { return t_max - t_min + 1; }
};

/// phi(t) = [y(t+n_a),...,y(t-n_b), u(t-1),...,u(t-n_c)]^T.
/// Throws NumericalError when t is outside the valid window.
Regressor build_regressor(const Dataset& data, long t, const RegressorSpec& spec);

/// Inclusive index range over which build_regressor succeeds. All dataset
/// sums iterate exactly this range; the 1/N normalization uses its count.
SampleRange valid_sample_range(const RegressorSpec& spec, long n_samples);

}  // namespace pgnnff
