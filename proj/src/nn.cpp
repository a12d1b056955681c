#include "pgnnff/nn.hpp"

#include <cmath>

#include "pgnnff/rng.hpp"

namespace pgnnff {

namespace {

Vec activate(const NNParams& nn, Vec z) {
  if (nn.activation == Activation::Tanh)
    z = z.array().tanh().matrix();
  return z;
}

void check_input(const NNParams& nn, const Vec& input) {
  if (input.size() != nn.input_width())
    throw NumericalError("nn: input length " + std::to_string(input.size()) +
                         " does not match first layer width " +
                         std::to_string(nn.input_width()));
}

}  // namespace

double nn_forward(const NNParams& nn, const Vec& input) {
  check_input(nn, input);
  Vec h = input;
  const std::size_t l = nn.layers.size() - 1;
  for (std::size_t i = 0; i < l; ++i)
    h = activate(nn, nn.layers[i].W * h + nn.layers[i].B);
  return (nn.layers[l].W * h + nn.layers[l].B)(0);
}

Vec hidden_output(const NNParams& nn, const Vec& input) {
  check_input(nn, input);
  Vec h = input;
  for (std::size_t i = 0; i + 1 < nn.layers.size(); ++i)
    h = activate(nn, nn.layers[i].W * h + nn.layers[i].B);
  return h;
}

NNGradient nn_gradient(const NNParams& nn, const Vec& input) {
  check_input(nn, input);
  const std::size_t l = nn.layers.size() - 1;

  // Forward pass, keeping activations per layer.
  std::vector<Vec> act(l + 1);
  act[0] = input;
  for (std::size_t i = 0; i < l; ++i)
    act[i + 1] = activate(nn, nn.layers[i].W * act[i] + nn.layers[i].B);

  NNGradient g;
  g.layers.resize(nn.layers.size());

  // Output layer: d f / d W_out = h_l, d f / d B_out = 1.
  g.layers[l].W = act[l].transpose();
  g.layers[l].B = Vec::Ones(1);

  // Backpropagate d f / d z_i through the hidden stack.
  Vec dz = nn.layers[l].W.transpose().col(0);  // d f / d a_l
  for (std::size_t i = l; i-- > 0;) {
    if (nn.activation == Activation::Tanh)
      dz = dz.cwiseProduct(
          (Vec::Ones(act[i + 1].size()) - act[i + 1].cwiseProduct(act[i + 1])));
    g.layers[i].W = dz * act[i].transpose();
    g.layers[i].B = dz;
    if (i > 0) dz = nn.layers[i].W.transpose() * dz;
  }
  return g;
}

NNParams init_hidden_random(const std::vector<int>& widths, std::uint64_t seed,
                            double scale) {
  if (widths.size() < 2)
    throw ConfigError("init_hidden_random: need input width plus >= 1 hidden");
  for (int w : widths)
    if (w < 1) throw ConfigError("init_hidden_random: widths must be >= 1");

  Rng rng = Rng::derive(seed, /*stream=*/0x48494444454eULL);
  NNParams nn;
  nn.activation = Activation::Tanh;
  for (std::size_t i = 1; i < widths.size(); ++i) {
    NNLayer layer;
    const int fan_in = widths[i - 1];
    const double bound = scale / std::sqrt(static_cast<double>(fan_in));
    layer.W.resize(widths[i], fan_in);
    layer.B.resize(widths[i]);
    for (long r = 0; r < layer.W.rows(); ++r)
      for (long c = 0; c < layer.W.cols(); ++c)
        layer.W(r, c) = rng.uniform(-bound, bound);
    for (long r = 0; r < layer.B.size(); ++r)
      layer.B[r] = rng.uniform(-bound, bound);
    nn.layers.push_back(std::move(layer));
  }
  NNLayer out;
  out.W = Mat::Zero(1, widths.back());
  out.B = Vec::Zero(1);
  nn.layers.push_back(std::move(out));
  return nn;
}

Mat hidden_output_batch(const NNParams& nn, const Mat& inputs) {
  if (inputs.cols() != nn.input_width())
    throw NumericalError("nn: batched input width mismatch");
  Mat h = inputs;
  for (std::size_t i = 0; i + 1 < nn.layers.size(); ++i) {
    h = (h * nn.layers[i].W.transpose()).rowwise() +
        nn.layers[i].B.transpose();
    if (nn.activation == Activation::Tanh) h = h.array().tanh().matrix();
  }
  return h;
}

Vec nn_forward_batch(const NNParams& nn, const Mat& inputs) {
  const Mat h = hidden_output_batch(nn, inputs);
  const auto& out = nn.layers.back();
  return (h * out.W.transpose()).col(0).array() + out.B(0);
}

}  // namespace pgnnff
