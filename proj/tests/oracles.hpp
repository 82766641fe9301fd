// Test-only reference implementations, independent of the library's kernels:
// bounds-checked brute-force convolution loops, a dense network autodiff
// walk without caching/masking/stop logic, central finite differences,
// adaptive-quadrature p-values, and a least-squares pixel probe.
#pragma once

#include <functional>
#include <vector>

#include "trady/network.hpp"
#include "trady/tensor.hpp"

namespace oracle {

trady::Tensor4 conv_forward(const trady::Tensor4& input, const trady::Tensor4& weights,
                            const trady::ConvGeometry& geom);

trady::Tensor4 conv_weight_grad(const trady::Tensor4& input, const trady::Tensor4& upstream,
                                const trady::ConvGeometry& geom);

trady::Tensor4 conv_input_grad(const trady::Tensor4& weights, const trady::Tensor4& upstream,
                               const trady::ConvGeometry& geom, int in_h, int in_w, int batch);

struct DenseGrads {
  std::vector<trady::Tensor4> conv_grads;  // by conv ordinal
  trady::Matrix fc_dw;
  std::vector<double> fc_db;
};

// Softmax cross-entropy loss and full dense gradients via a plain
// store-everything forward/backward walk.
double network_loss(const trady::NetworkSpec& spec, const trady::Parameters& params,
                    const trady::Tensor4& batch, const std::vector<int>& labels);
DenseGrads network_grads(const trady::NetworkSpec& spec, const trady::Parameters& params,
                         const trady::Tensor4& batch, const std::vector<int>& labels);

// Central finite-difference gradient of f over every conv weight and the
// classifier, with step h.
DenseGrads finite_difference_grads(const trady::NetworkSpec& spec, trady::Parameters params,
                                   const std::function<double(const trady::Parameters&)>& f,
                                   double h);

// Adaptive-Simpson integral of f over [a,b], abs tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

// Two-sided t-distribution p-value by quadrature of the density.
double t_two_sided_p_quadrature(double t, double df);

// Regularized incomplete beta by quadrature (a,b >= 1 recommended).
double ibeta_quadrature(double a, double b, double x);

// Ridge least-squares one-hot classifier on raw pixels; returns accuracy on
// the evaluation set.
double linear_probe_accuracy(const trady::Tensor4& train_x, const std::vector<int>& train_y,
                             const trady::Tensor4& test_x, const std::vector<int>& test_y,
                             int classes);

}  // namespace oracle
