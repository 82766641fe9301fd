#pragma once

#include <cstdint>
#include <vector>

namespace trady {

// Per-layer boolean vectors over input channels (one per conv layer, in
// network order) plus the derived totals of the selected set.
struct SelectionMask {
  std::vector<std::vector<std::uint8_t>> layers;
  std::uint64_t slots = 0;            // selected weight+activation slots
  std::uint64_t macs_per_sample = 0;  // selected weight-grad MACs per sample

  std::size_t selected_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
      for (std::uint8_t m : l) n += m ? 1 : 0;
    }
    return n;
  }
  bool any() const { return selected_count() > 0; }
};

}  // namespace trady
