#pragma once

#include <cstdint>
#include <vector>

#include "trady/tensor.hpp"

namespace trady {

// Per-channel memory cost in slots (one slot = one stored scalar):
// weight_slots = (C'/g)*D*D, activation_slots = H*W.
struct ChannelCost {
  std::uint64_t weight_slots = 0;
  std::uint64_t activation_slots = 0;
  std::uint64_t total() const { return weight_slots + activation_slots; }
};

ChannelCost channel_cost(const ConvGeometry& geom, int in_h, int in_w);

// Per-sample multiply-accumulates for one input channel's weight gradient:
// D^2 * (C'/g) * H' * W'.
std::uint64_t channel_macs(const ConvGeometry& geom, int out_h, int out_w);

// One entry per conv layer; channels within a layer share identical costs.
struct LayerCost {
  int layer_index = -1;  // index into the NetworkSpec layer list
  int channels = 0;      // input channels C
  ChannelCost per_channel;
  std::uint64_t per_channel_macs = 0;
};

struct ChannelCostTable {
  std::vector<LayerCost> layers;

  std::uint64_t total_slots() const;
  std::uint64_t total_weight_slots() const;
  std::uint64_t total_activation_slots() const;
  std::uint64_t total_macs_per_sample() const;
};

struct Budget {
  std::uint64_t limit = 0;  // memory slots
};

struct SelectionCost {
  std::uint64_t slots = 0;
  std::uint64_t macs_per_sample = 0;
  std::uint64_t weight_slots = 0;
  std::uint64_t activation_slots = 0;
};

// Mask layout: one boolean vector per conv layer, ordered as in the table.
SelectionCost selection_cost(const std::vector<std::vector<std::uint8_t>>& mask,
                             const ChannelCostTable& table);

struct SparsityReport {
  double weight_sparsity = 0.0;
  double activation_sparsity = 0.0;
  double macs_saved_fraction = 0.0;
  std::uint64_t selected_macs = 0;  // analytic, per processed sample count
};

// `instrumented_macs` comes from the backward pass counter over
// `samples` processed inputs; must equal the analytic count exactly.
SparsityReport sparsity_report(const std::vector<std::vector<std::uint8_t>>& mask,
                               const ChannelCostTable& table, std::uint64_t instrumented_macs,
                               std::uint64_t samples);

}  // namespace trady
