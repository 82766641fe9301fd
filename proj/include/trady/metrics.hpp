#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "trady/cost_model.hpp"
#include "trady/network.hpp"

namespace trady {

struct ChannelScore {
  int layer_ordinal = 0;  // conv ordinal
  int channel = 0;
  double raw_norm = 0.0;
  double rgn = 0.0;
};

// Euclidean norm of one input channel's weight-gradient slice
// (over the (c',k,l) entries of its group). Errors on uncomputed slices.
double channel_grad_norm(const Tensor4& wgrad, const ConvGeometry& geom, int channel,
                         const std::vector<std::uint8_t>& computed);

double channel_rgn(double raw_norm, const ChannelCost& cost);

// Sum of channel RGNs over a fully-computed layer gradient. Cross-checked
// against the single-division form (uniform per-channel cost).
double layer_rgn(const Tensor4& wgrad, const ConvGeometry& geom, const ChannelCost& cost,
                 const std::vector<std::uint8_t>& computed);

// Per-layer values accumulated across epochs; index = conv ordinal.
struct LayerRgnProfile {
  std::vector<double> rgn;
  std::vector<double> raw;
};

// Layers sorted by value descending (ties by index ascending), cumulative
// fraction of the total at each prefix length k = 1..n.
std::vector<std::pair<int, double>> cumulative_rgn_curve(const std::vector<double>& profile);

// All channel scores of a fully-computed GradientSet, ordered by
// (layer ordinal, channel).
std::vector<ChannelScore> score_all_channels(const NetworkSpec& spec, const GradientSet& grads,
                                             const ChannelCostTable& table);

}  // namespace trady
