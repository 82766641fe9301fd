#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trady/conv.hpp"
#include "trady/cost_model.hpp"
#include "trady/mask.hpp"
#include "trady/primitives.hpp"
#include "trady/rng.hpp"
#include "trady/tensor.hpp"

namespace trady {

struct LayerSpec {
  enum class Kind { Conv, Relu, ResidualBegin, ResidualAdd, GlobalAvgPool, Linear };
  Kind kind = Kind::Relu;
  ConvGeometry geom;       // Conv
  int tag = -1;            // ResidualBegin/ResidualAdd
  int in_features = 0;     // Linear
  int out_features = 0;    // Linear

  static LayerSpec conv(const ConvGeometry& g);
  static LayerSpec relu();
  static LayerSpec residual_begin(int tag);
  static LayerSpec residual_add(int tag);
  static LayerSpec gap();
  static LayerSpec linear(int in, int out);
};

struct TensorShape {
  int channels = 0, h = 0, w = 0;
  bool operator==(const TensorShape&) const = default;
};

// Declarative layer sequence with a declared input shape; exactly one
// trailing Linear (the classifier).
struct NetworkSpec {
  TensorShape input;
  std::vector<LayerSpec> layers;

  // Throws unless shapes propagate end-to-end, residual tags match with
  // equal shapes, and the classifier is the single trailing Linear.
  void validate() const;

  std::vector<int> conv_layer_indices() const;
  int conv_count() const { return static_cast<int>(conv_layer_indices().size()); }
  // Input shape of every layer, by layer index (validated propagation).
  std::vector<TensorShape> layer_inputs() const;
  int classes() const { return layers.back().out_features; }
};

ChannelCostTable make_cost_table(const NetworkSpec& spec);

struct Parameters {
  std::vector<Tensor4> conv_w;  // by conv ordinal, [C',C/g,D,D]
  Matrix fc_w;                  // [out,in]
  std::vector<double> fc_b;
};

Parameters init_params(const NetworkSpec& spec, Rng& rng);

struct ActivationCache {
  struct ConvSlice {
    std::vector<int> channels;  // selected channel ids, ascending
    Tensor4 stored;             // [B, |channels|, H, W]
  };
  std::vector<ConvSlice> conv;                        // by conv ordinal
  std::vector<std::vector<std::uint8_t>> relu_active;  // by relu ordinal
  Matrix classifier_input;
  std::uint64_t stored_activation_slots = 0;  // per-sample, sum of selected H*W
  int batch = 0;
};

struct ForwardResult {
  Matrix logits;
  ActivationCache cache;
};

// Dense forward; the mask controls only what is cached for backward.
ForwardResult forward(const NetworkSpec& spec, const Parameters& params, const Tensor4& batch,
                      const SelectionMask& mask);

struct GradientSet {
  std::vector<Tensor4> conv_grads;                  // by conv ordinal; unselected slices zero
  std::vector<std::vector<std::uint8_t>> computed;  // per input channel flags
  Matrix fc_dw;
  std::vector<double> fc_db;
  std::uint64_t wgrad_macs = 0;  // instrumented conv weight-grad MACs
};

GradientSet backward(const NetworkSpec& spec, const Parameters& params,
                     const ActivationCache& cache, const Matrix& dlogits,
                     const SelectionMask& mask);

// w <- w - lr*g, only where the computed flag is set; frozen slices untouched.
void sgd_step(Parameters& params, const GradientSet& grads, double lr);

// Linear warmup 0 -> lr_max over [0,warmup], then cosine to 0 at epoch T.
double cosine_warmup_lr(int epoch, int total_epochs, int warmup_epochs, double lr_max);

SelectionMask full_mask(const NetworkSpec& spec);
SelectionMask empty_mask(const NetworkSpec& spec);

// Reference desk-scale nets.
NetworkSpec toynet_residual_spec(int in_channels, int hw, int classes, int width = 8);
NetworkSpec toynet_wide_spec(int in_channels, int hw, int classes, int width = 64);
NetworkSpec make_network(const std::string& name, int in_channels, int hw, int classes,
                         int width);

}  // namespace trady
