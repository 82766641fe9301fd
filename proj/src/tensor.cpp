#include "trady/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trady {

Tensor4 Tensor4::from_data(std::array<std::size_t, 4> shape, std::vector<double> data) {
  const std::size_t expected = shape[0] * shape[1] * shape[2] * shape[3];
  if (data.size() != expected) {
    std::ostringstream oss;
    oss << "Tensor4: data length " << data.size() << " does not match shape product " << expected;
    throw std::invalid_argument(oss.str());
  }
  Tensor4 t;
  t.shape_ = shape;
  t.data_ = std::move(data);
  return t;
}

std::string Tensor4::shape_str() const {
  std::ostringstream oss;
  oss << "[" << shape_[0] << "," << shape_[1] << "," << shape_[2] << "," << shape_[3] << "]";
  return oss.str();
}

void Tensor4::check_finite(const char* what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string(what) + ": non-finite entry in tensor " + shape_str());
    }
  }
}

void ConvGeometry::validate() const {
  if (in_channels < 1 || out_channels < 1) {
    throw std::invalid_argument("ConvGeometry: channel counts must be >= 1");
  }
  if (kernel < 1 || stride < 1 || dilation < 1 || padding < 0 || groups < 1) {
    throw std::invalid_argument("ConvGeometry: kernel/stride/dilation must be >= 1, padding >= 0");
  }
  if (in_channels % groups != 0 || out_channels % groups != 0) {
    std::ostringstream oss;
    oss << "ConvGeometry: groups " << groups << " must divide in_channels " << in_channels
        << " and out_channels " << out_channels;
    throw std::invalid_argument(oss.str());
  }
}

int ConvGeometry::out_dim(int in_dim) const {
  const int span = in_dim + 2 * padding - dilation * (kernel - 1) - 1;
  if (span < 0) {
    std::ostringstream oss;
    oss << "ConvGeometry: input extent " << in_dim << " too small for kernel " << kernel
        << " (pad " << padding << ", dilation " << dilation << ")";
    throw std::invalid_argument(oss.str());
  }
  return span / stride + 1;
}

}  // namespace trady
