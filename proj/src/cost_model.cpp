#include "trady/cost_model.hpp"

#include <sstream>
#include <stdexcept>

namespace trady {

ChannelCost channel_cost(const ConvGeometry& geom, int in_h, int in_w) {
  geom.validate();
  if (in_h < 1 || in_w < 1) throw std::invalid_argument("channel_cost: empty input plane");
  ChannelCost c;
  c.weight_slots = static_cast<std::uint64_t>(geom.out_per_group()) *
                   static_cast<std::uint64_t>(geom.kernel) * static_cast<std::uint64_t>(geom.kernel);
  c.activation_slots = static_cast<std::uint64_t>(in_h) * static_cast<std::uint64_t>(in_w);
  return c;
}

std::uint64_t channel_macs(const ConvGeometry& geom, int out_h, int out_w) {
  geom.validate();
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("channel_macs: empty output plane");
  return static_cast<std::uint64_t>(geom.kernel) * static_cast<std::uint64_t>(geom.kernel) *
         static_cast<std::uint64_t>(geom.out_per_group()) * static_cast<std::uint64_t>(out_h) *
         static_cast<std::uint64_t>(out_w);
}

std::uint64_t ChannelCostTable::total_slots() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) s += static_cast<std::uint64_t>(l.channels) * l.per_channel.total();
  return s;
}

std::uint64_t ChannelCostTable::total_weight_slots() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) {
    s += static_cast<std::uint64_t>(l.channels) * l.per_channel.weight_slots;
  }
  return s;
}

std::uint64_t ChannelCostTable::total_activation_slots() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) {
    s += static_cast<std::uint64_t>(l.channels) * l.per_channel.activation_slots;
  }
  return s;
}

std::uint64_t ChannelCostTable::total_macs_per_sample() const {
  std::uint64_t s = 0;
  for (const auto& l : layers) s += static_cast<std::uint64_t>(l.channels) * l.per_channel_macs;
  return s;
}

namespace {

void check_mask_dims(const std::vector<std::vector<std::uint8_t>>& mask,
                     const ChannelCostTable& table) {
  if (mask.size() != table.layers.size()) {
    std::ostringstream oss;
    oss << "selection_cost: mask has " << mask.size() << " layers, table has "
        << table.layers.size();
    throw std::invalid_argument(oss.str());
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (static_cast<int>(mask[i].size()) != table.layers[i].channels) {
      std::ostringstream oss;
      oss << "selection_cost: layer " << i << " mask length " << mask[i].size()
          << " != channel count " << table.layers[i].channels;
      throw std::invalid_argument(oss.str());
    }
  }
}

}  // namespace

SelectionCost selection_cost(const std::vector<std::vector<std::uint8_t>>& mask,
                             const ChannelCostTable& table) {
  check_mask_dims(mask, table);
  SelectionCost out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const LayerCost& l = table.layers[i];
    std::uint64_t n = 0;
    for (std::uint8_t m : mask[i]) n += m ? 1 : 0;
    out.weight_slots += n * l.per_channel.weight_slots;
    out.activation_slots += n * l.per_channel.activation_slots;
    out.slots += n * l.per_channel.total();
    out.macs_per_sample += n * l.per_channel_macs;
  }
  return out;
}

SparsityReport sparsity_report(const std::vector<std::vector<std::uint8_t>>& mask,
                               const ChannelCostTable& table, std::uint64_t instrumented_macs,
                               std::uint64_t samples) {
  const SelectionCost sel = selection_cost(mask, table);
  const std::uint64_t analytic = sel.macs_per_sample * samples;
  if (instrumented_macs != analytic) {
    std::ostringstream oss;
    oss << "sparsity_report: instrumented MACs " << instrumented_macs
        << " != analytic selected MACs " << analytic << " (" << sel.macs_per_sample << " x "
        << samples << " samples)";
    throw std::runtime_error(oss.str());
  }
  SparsityReport r;
  r.selected_macs = analytic;
  const std::uint64_t tw = table.total_weight_slots();
  const std::uint64_t ta = table.total_activation_slots();
  const std::uint64_t tm = table.total_macs_per_sample();
  r.weight_sparsity =
      tw == 0 ? 0.0 : 1.0 - static_cast<double>(sel.weight_slots) / static_cast<double>(tw);
  r.activation_sparsity =
      ta == 0 ? 0.0 : 1.0 - static_cast<double>(sel.activation_slots) / static_cast<double>(ta);
  r.macs_saved_fraction =
      tm == 0 ? 0.0 : 1.0 - static_cast<double>(sel.macs_per_sample) / static_cast<double>(tm);
  return r;
}

}  // namespace trady
