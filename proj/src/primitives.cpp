#include "trady/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trady {

namespace {

void require_same_shape(const Tensor4& a, const Tensor4& b, const char* op) {
  if (!a.same_shape(b)) {
    std::ostringstream oss;
    oss << op << ": shape mismatch " << a.shape_str() << " vs " << b.shape_str();
    throw std::invalid_argument(oss.str());
  }
}

}  // namespace

ReluResult relu_forward(const Tensor4& input) {
  ReluResult r;
  r.output = input;
  r.active.assign(input.size(), 0);
  double* out = r.output.data();
  for (std::size_t i = 0; i < r.output.size(); ++i) {
    if (out[i] > 0.0) {
      r.active[i] = 1;
    } else {
      out[i] = 0.0;
    }
  }
  return r;
}

Tensor4 relu_backward(const std::vector<std::uint8_t>& active, const Tensor4& upstream) {
  if (active.size() != upstream.size()) {
    throw std::invalid_argument("relu_backward: indicator size != upstream size");
  }
  Tensor4 dx = upstream;
  double* d = dx.data();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!active[i]) d[i] = 0.0;
  }
  return dx;
}

Tensor4 gap_forward(const Tensor4& input) {
  const std::size_t B = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  if (H == 0 || W == 0) throw std::invalid_argument("gap_forward: empty spatial dims");
  Tensor4 out(B, C, 1, 1);
  const double inv = 1.0 / static_cast<double>(H * W);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) {
      double acc = 0.0;
      for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) acc += input.at(b, c, h, w);
      }
      out.at(b, c, 0, 0) = acc * inv;
    }
  }
  return out;
}

Tensor4 gap_backward(const Tensor4& upstream, int in_h, int in_w) {
  const std::size_t B = upstream.dim(0), C = upstream.dim(1);
  if (upstream.dim(2) != 1 || upstream.dim(3) != 1) {
    throw std::invalid_argument("gap_backward: upstream must be [B,C,1,1], got " +
                                upstream.shape_str());
  }
  Tensor4 dx(B, C, static_cast<std::size_t>(in_h), static_cast<std::size_t>(in_w));
  const double inv = 1.0 / static_cast<double>(in_h * in_w);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) {
      const double v = upstream.at(b, c, 0, 0) * inv;
      for (int h = 0; h < in_h; ++h) {
        for (int w = 0; w < in_w; ++w) {
          dx.at(b, c, static_cast<std::size_t>(h), static_cast<std::size_t>(w)) = v;
        }
      }
    }
  }
  return dx;
}

Matrix linear_forward(const Matrix& input, const Matrix& weight, const std::vector<double>& bias) {
  if (input.cols != weight.cols) {
    std::ostringstream oss;
    oss << "linear_forward: input cols " << input.cols << " != weight in-features " << weight.cols;
    throw std::invalid_argument(oss.str());
  }
  if (bias.size() != weight.rows) {
    throw std::invalid_argument("linear_forward: bias length != out-features");
  }
  Matrix out(input.rows, weight.rows);
  for (std::size_t b = 0; b < input.rows; ++b) {
    for (std::size_t o = 0; o < weight.rows; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < input.cols; ++i) acc += input.at(b, i) * weight.at(o, i);
      out.at(b, o) = acc;
    }
  }
  return out;
}

LinearGrad linear_backward(const Matrix& input, const Matrix& weight, const Matrix& upstream) {
  if (upstream.rows != input.rows || upstream.cols != weight.rows) {
    throw std::invalid_argument("linear_backward: upstream shape mismatch");
  }
  LinearGrad g;
  g.dinput = Matrix(input.rows, input.cols);
  g.dweight = Matrix(weight.rows, weight.cols);
  g.dbias.assign(weight.rows, 0.0);
  for (std::size_t b = 0; b < input.rows; ++b) {
    for (std::size_t o = 0; o < weight.rows; ++o) {
      const double u = upstream.at(b, o);
      g.dbias[o] += u;
      for (std::size_t i = 0; i < input.cols; ++i) {
        g.dweight.at(o, i) += u * input.at(b, i);
        g.dinput.at(b, i) += u * weight.at(o, i);
      }
    }
  }
  return g;
}

Tensor4 residual_add_forward(const Tensor4& a, const Tensor4& b) {
  require_same_shape(a, b, "residual_add");
  Tensor4 out = a;
  double* o = out.data();
  const double* p = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) o[i] += p[i];
  return out;
}

SoftmaxCrossEntropy softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
  if (labels.size() != logits.rows) {
    throw std::invalid_argument("softmax_cross_entropy: labels length != batch");
  }
  const std::size_t B = logits.rows, K = logits.cols;
  for (std::size_t b = 0; b < B; ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= K) {
      std::ostringstream oss;
      oss << "softmax_cross_entropy: label " << labels[b] << " out of range [0," << K << ")";
      throw std::invalid_argument(oss.str());
    }
  }
  SoftmaxCrossEntropy r;
  r.dlogits = Matrix(B, K);
  r.argmax.assign(B, 0);
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    double mx = logits.at(b, 0);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (logits.at(b, k) > mx) {
        mx = logits.at(b, k);
        arg = k;
      }
    }
    r.argmax[b] = static_cast<int>(arg);
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(logits.at(b, k) - mx);
    const std::size_t y = static_cast<std::size_t>(labels[b]);
    total += -(logits.at(b, y) - mx - std::log(z));
    for (std::size_t k = 0; k < K; ++k) {
      const double p = std::exp(logits.at(b, k) - mx) / z;
      r.dlogits.at(b, k) = (p - (k == y ? 1.0 : 0.0)) / static_cast<double>(B);
    }
  }
  r.loss = total / static_cast<double>(B);
  return r;
}

}  // namespace trady
