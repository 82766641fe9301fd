#include <doctest.h>

#include "test_support.hpp"
#include "trady/cost_model.hpp"
#include "trady/network.hpp"

using namespace trady;

TEST_CASE("channel_cost: formula cases") {
  CHECK(channel_cost(ConvGeometry{4, 8, 3, 1, 1, 1, 1}, 16, 16).weight_slots == 72);
  CHECK(channel_cost(ConvGeometry{4, 8, 3, 1, 1, 1, 1}, 16, 16).activation_slots == 256);
  CHECK(channel_cost(ConvGeometry{4, 8, 3, 1, 1, 1, 1}, 16, 16).total() == 328);

  const ChannelCost dw = channel_cost(ConvGeometry{8, 8, 3, 1, 1, 1, 8}, 16, 16);
  CHECK(dw.weight_slots == 9);
  CHECK(dw.total() == 265);

  const ChannelCost pw = channel_cost(ConvGeometry{2, 4, 1, 1, 0, 1, 1}, 2, 2);
  CHECK(pw.weight_slots == 4);
  CHECK(pw.activation_slots == 4);
  CHECK(pw.total() == 8);
}

TEST_CASE("channel_macs: formula cases") {
  CHECK(channel_macs(ConvGeometry{4, 8, 3, 1, 1, 1, 1}, 14, 14) == 14112);
  CHECK(channel_macs(ConvGeometry{1, 1, 1, 1, 0, 1, 1}, 1, 1) == 1);
  CHECK(channel_macs(ConvGeometry{8, 8, 3, 1, 1, 1, 8}, 14, 14) == 1764);
}

TEST_CASE("selection_cost: empty, full and random masks vs brute force") {
  const NetworkSpec spec = toynet_residual_spec(1, 16, 4);
  const ChannelCostTable table = make_cost_table(spec);

  std::vector<std::vector<std::uint8_t>> empty, full;
  for (const auto& l : table.layers) {
    empty.emplace_back(static_cast<std::size_t>(l.channels), 0);
    full.emplace_back(static_cast<std::size_t>(l.channels), 1);
  }
  const SelectionCost e = selection_cost(empty, table);
  CHECK(e.slots == 0);
  CHECK(e.macs_per_sample == 0);
  const SelectionCost f = selection_cost(full, table);
  CHECK(f.slots == table.total_slots());
  CHECK(f.macs_per_sample == table.total_macs_per_sample());

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::uint8_t>> mask = empty;
    for (auto& lane : mask) {
      for (auto& v : lane) v = rng.next_below(2) != 0;
    }
    std::uint64_t slots = 0, macs = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      for (auto v : mask[i]) {
        if (v) {
          slots += table.layers[i].per_channel.total();
          macs += table.layers[i].per_channel_macs;
        }
      }
    }
    const SelectionCost sc = selection_cost(mask, table);
    CHECK(sc.slots == slots);
    CHECK(sc.macs_per_sample == macs);
  }
}

TEST_CASE("selection_cost: dimension mismatch throws") {
  const NetworkSpec spec = toynet_residual_spec(1, 16, 4);
  const ChannelCostTable table = make_cost_table(spec);
  std::vector<std::vector<std::uint8_t>> wrong(table.layers.size() - 1);
  CHECK_THROWS_AS(selection_cost(wrong, table), std::invalid_argument);
}

TEST_CASE("sparsity_report: endpoints and the counter identity") {
  const NetworkSpec spec = toynet_wide_spec(1, 8, 4, 16);
  const ChannelCostTable table = make_cost_table(spec);
  std::vector<std::vector<std::uint8_t>> empty, full;
  for (const auto& l : table.layers) {
    empty.emplace_back(static_cast<std::size_t>(l.channels), 0);
    full.emplace_back(static_cast<std::size_t>(l.channels), 1);
  }
  const SparsityReport r0 = sparsity_report(empty, table, 0, 7);
  CHECK(r0.weight_sparsity == 1.0);
  CHECK(r0.activation_sparsity == 1.0);
  CHECK(r0.macs_saved_fraction == 1.0);

  const SparsityReport r1 =
      sparsity_report(full, table, table.total_macs_per_sample() * 7, 7);
  CHECK(r1.weight_sparsity == 0.0);
  CHECK(r1.activation_sparsity == 0.0);
  CHECK(r1.macs_saved_fraction == 0.0);

  CHECK_THROWS_WITH_AS(sparsity_report(full, table, 123, 7),
                       doctest::Contains("instrumented MACs"), std::runtime_error);
}

TEST_CASE("sparsity_report: half the channels of a uniform single-layer net") {
  // One conv layer with uniform channels; selecting half gives 0.5 everywhere.
  NetworkSpec spec;
  spec.input = {8, 4, 4};
  spec.layers = {LayerSpec::conv(ConvGeometry{8, 8, 1, 1, 0, 1, 1}), LayerSpec::gap(),
                 LayerSpec::linear(8, 2)};
  spec.validate();
  const ChannelCostTable table = make_cost_table(spec);
  std::vector<std::vector<std::uint8_t>> half = {{1, 1, 1, 1, 0, 0, 0, 0}};
  const std::uint64_t macs = selection_cost(half, table).macs_per_sample;
  const SparsityReport r = sparsity_report(half, table, macs * 3, 3);
  CHECK(r.weight_sparsity == 0.5);
  CHECK(r.activation_sparsity == 0.5);
  CHECK(r.macs_saved_fraction == 0.5);
}

TEST_CASE("cost model: budget implies sparsity bound, cost monotonicity") {
  const NetworkSpec spec = toynet_residual_spec(1, 16, 4);
  const ChannelCostTable table = make_cost_table(spec);
  const std::uint64_t total_act = table.total_activation_slots();

  Rng rng(17);
  std::vector<std::vector<std::uint8_t>> mask;
  for (const auto& l : table.layers) {
    mask.emplace_back(static_cast<std::size_t>(l.channels), 0);
  }
  std::uint64_t prev_slots = 0, prev_macs = 0;
  for (int add = 0; add < 10; ++add) {
    // add one random unselected channel
    while (true) {
      const std::size_t li = rng.next_below(mask.size());
      const std::size_t c = rng.next_below(mask[li].size());
      if (!mask[li][c]) {
        mask[li][c] = 1;
        break;
      }
    }
    const SelectionCost sc = selection_cost(mask, table);
    CHECK(sc.slots > prev_slots);
    CHECK(sc.macs_per_sample > prev_macs);
    prev_slots = sc.slots;
    prev_macs = sc.macs_per_sample;

    // budget-implies-sparsity arithmetic at the current usage level
    const std::uint64_t b_mem = sc.slots;
    const SparsityReport r = sparsity_report(mask, table, sc.macs_per_sample, 1);
    CHECK(r.activation_sparsity >=
          1.0 - static_cast<double>(b_mem) / static_cast<double>(total_act) - 1e-12);
  }
}
