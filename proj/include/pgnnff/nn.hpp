#pragma once

#include <cstdint>
#include <vector>

#include "pgnnff/types.hpp"

namespace pgnnff {

/// Scalar network output W_{l+1} a_l(... a_1(W_1 x + B_1)) + B_{l+1}.
double nn_forward(const NNParams& nn, const Vec& input);

/// Output of the last hidden layer; nn_forward == W_out * hidden + B_out.
Vec hidden_output(const NNParams& nn, const Vec& input);

/// d f_NN / d p for every weight and bias, same shapes as NNParams.layers.
struct NNGradient {
  std::vector<NNLayer> layers;
};
NNGradient nn_gradient(const NNParams& nn, const Vec& input);

/// Hidden weights/biases drawn uniformly from [-scale/sqrt(fan_in),
/// +scale/sqrt(fan_in)]; the width-1 output layer is a zero placeholder
/// (filled later by the output-layer initialization). Deterministic in seed.
/// widths = {input width, hidden_1, ..., hidden_l}.
NNParams init_hidden_random(const std::vector<int>& widths, std::uint64_t seed,
                            double scale = 1.0);

// Batched forms used by training (rows = samples).
Mat hidden_output_batch(const NNParams& nn, const Mat& inputs);
Vec nn_forward_batch(const NNParams& nn, const Mat& inputs);

}  // namespace pgnnff
