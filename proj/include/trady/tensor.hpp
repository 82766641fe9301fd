#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace trady {

// Dense rank-4 array (n0,n1,n2,n3), row-major, 64-bit floats. The carrier for
// activations, upstream derivatives and conv kernels [C',C/g,D,D].
class Tensor4 {
 public:
  Tensor4() : shape_{0, 0, 0, 0} {}
  Tensor4(std::size_t n0, std::size_t n1, std::size_t n2, std::size_t n3)
      : shape_{n0, n1, n2, n3}, data_(n0 * n1 * n2 * n3, 0.0) {}

  static Tensor4 from_data(std::array<std::size_t, 4> shape, std::vector<double> data);

  const std::array<std::size_t, 4>& shape() const { return shape_; }
  std::size_t dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
    return data_[((i0 * shape_[1] + i1) * shape_[2] + i2) * shape_[3] + i3];
  }
  double at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const {
    return data_[((i0 * shape_[1] + i1) * shape_[2] + i2) * shape_[3] + i3];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool same_shape(const Tensor4& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

  // Throws if any entry is NaN or Inf; `what` names the tensor in the message.
  void check_finite(const char* what) const;

 private:
  std::array<std::size_t, 4> shape_;
  std::vector<double> data_;
};

// Geometry of one 2D convolution: square kernel, grouped form where
// g | C and g | C'. Depthwise is the special case g == C == C'.
struct ConvGeometry {
  int in_channels = 1;   // C
  int out_channels = 1;  // C'
  int kernel = 1;        // D
  int stride = 1;
  int padding = 0;
  int dilation = 1;
  int groups = 1;

  void validate() const;
  int in_per_group() const { return in_channels / groups; }
  int out_per_group() const { return out_channels / groups; }
  // H' = floor((H + 2*pad - dilation*(D-1) - 1)/stride) + 1, same for W'.
  int out_dim(int in_dim) const;
  int group_of_input_channel(int c) const { return c / in_per_group(); }
};

}  // namespace trady
