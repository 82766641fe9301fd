#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trady/cost_model.hpp"
#include "trady/mask.hpp"
#include "trady/metrics.hpp"
#include "trady/network.hpp"
#include "trady/rng.hpp"

namespace trady {

// Conv-layer ordinals eligible for sampling, in priority order.
struct LayerPool {
  std::vector<int> layers;
};

struct ChannelRef {
  int layer_ordinal = 0;
  int channel = 0;
};

// Greedy budget fill over the given scan order: add each channel whose slot
// cost still fits, skip the ones that would overflow, never stop early.
// `scan_checks`, when given, receives the number of cost checks performed.
SelectionMask fill_by_order(const std::vector<ChannelRef>& order, const ChannelCostTable& table,
                            const Budget& budget, std::uint64_t* scan_checks = nullptr);

// Uniform random permutation of the pool's (layer, channel) pairs, then the
// greedy scan above.
SelectionMask sample_random_fill(const LayerPool& pool, const ChannelCostTable& table,
                                 const Budget& budget, Rng& rng);

// Channels sorted by score descending (ties by layer then channel index),
// then the greedy scan. Scores must cover every pool channel.
SelectionMask select_by_score(const std::vector<ChannelScore>& scores, const ChannelCostTable& table,
                              const Budget& budget, const LayerPool& pool, bool use_rgn);

// Minimal top-K prefix of the RGN-descending layer order whose cumulative
// fraction reaches theta.
LayerPool top_k_layers(const std::vector<double>& profile, double theta);

// Channel selected iff its score >= eps; not budget-constrained.
SelectionMask threshold_mask(const std::vector<ChannelScore>& scores,
                             const ChannelCostTable& table, double eps, bool use_rgn);

enum class StrategyKind { FullRandom, TopKRandom, DetRGN, DetRawNorm, Threshold };
enum class StrategyMode { Static, Dynamic };

StrategyKind strategy_kind_from_string(const std::string& s);
StrategyMode strategy_mode_from_string(const std::string& s);
std::string to_string(StrategyKind k);
std::string to_string(StrategyMode m);

// One training run's selection policy. Static mode caches the epoch-0 mask;
// Dynamic recomputes per epoch. TopKRandom+Dynamic is the TraDy scheme.
struct StrategyState {
  StrategyKind kind = StrategyKind::FullRandom;
  StrategyMode mode = StrategyMode::Dynamic;
  LayerPool pool;
  Budget budget;
  double eps = 0.0;             // Threshold kind
  bool threshold_on_rgn = true;  // Threshold kind metric
  Rng rng{0};
  std::optional<SelectionMask> static_mask;
};

// Score-based kinds (DetRGN/DetRawNorm/Threshold) need the epoch's
// full-gradient channel scores; random kinds ignore them.
SelectionMask strategy_step(StrategyState& state, const ChannelCostTable& table, int epoch,
                            const std::vector<ChannelScore>* profiling_scores);

}  // namespace trady
