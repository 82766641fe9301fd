#pragma once

#include <cstdint>
#include <vector>

#include "trady/tensor.hpp"

namespace trady {

// Result of the channel-masked weight-derivative pass. Slices of unselected
// input channels are exactly zero, flagged not-computed, and cost no
// arithmetic; `macs` counts every multiply-accumulate actually performed.
struct MaskedWeightGrad {
  Tensor4 grad;                      // [C', C/g, D, D]
  std::vector<std::uint8_t> computed;  // per input channel
  std::uint64_t macs = 0;
};

// Cross-correlation forward: input [B,C,H,W] x weights [C',C/g,D,D] -> [B,C',H',W'].
// No bias.
Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weights, const ConvGeometry& geom);

// Weight derivative restricted to selected input channels:
//   grad[c',c,k,l] = sum_{b,h',w'} input_pad[b,c,h'*stride+k*dil, w'*stride+l*dil]
//                                  * upstream[b,c',h',w']
// computed only for channels with mask[c] = true.
MaskedWeightGrad conv2d_weight_grad_masked(const Tensor4& input, const Tensor4& upstream,
                                           const ConvGeometry& geom,
                                           const std::vector<std::uint8_t>& mask);

// Full transposed-convolution gradient w.r.t. the input; never sparsified.
Tensor4 conv2d_input_grad(const Tensor4& weights, const Tensor4& upstream,
                          const ConvGeometry& geom, int in_h, int in_w, int batch);

}  // namespace trady
