#pragma once

#include <cstdint>
#include <vector>

#include "trady/tensor.hpp"

namespace trady {

struct ReluResult {
  Tensor4 output;
  // Indicator 1_{z>0} on pre-activations; entries strictly greater than zero.
  std::vector<std::uint8_t> active;
};

ReluResult relu_forward(const Tensor4& input);
Tensor4 relu_backward(const std::vector<std::uint8_t>& active, const Tensor4& upstream);

// Global average pool [B,C,H,W] -> [B,C,1,1].
Tensor4 gap_forward(const Tensor4& input);
Tensor4 gap_backward(const Tensor4& upstream, int in_h, int in_w);

// Row-major matrix, the carrier for classifier inputs/outputs and gradients.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Fully connected y = x W^T + b with x [B,in], W [out,in], b [out].
Matrix linear_forward(const Matrix& input, const Matrix& weight, const std::vector<double>& bias);

struct LinearGrad {
  Matrix dinput;
  Matrix dweight;
  std::vector<double> dbias;
};
LinearGrad linear_backward(const Matrix& input, const Matrix& weight, const Matrix& upstream);

Tensor4 residual_add_forward(const Tensor4& a, const Tensor4& b);
// Backward duplicates the upstream into both branches; callers just reuse it.

struct SoftmaxCrossEntropy {
  double loss = 0.0;      // mean over the batch
  Matrix dlogits;         // (softmax - onehot)/B
  std::vector<int> argmax;  // per-sample predicted class
};
SoftmaxCrossEntropy softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels);

}  // namespace trady
