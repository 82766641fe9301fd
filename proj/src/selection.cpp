#include "trady/selection.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace trady {

SelectionMask fill_by_order(const std::vector<ChannelRef>& order, const ChannelCostTable& table,
                            const Budget& budget, std::uint64_t* scan_checks) {
  SelectionMask mask;
  mask.layers.reserve(table.layers.size());
  for (const auto& l : table.layers) {
    mask.layers.emplace_back(static_cast<std::size_t>(l.channels), 0);
  }
  std::uint64_t used = 0;
  std::uint64_t checks = 0;
  for (const ChannelRef& ref : order) {
    const LayerCost& lc = table.layers[static_cast<std::size_t>(ref.layer_ordinal)];
    const std::uint64_t cost = lc.per_channel.total();
    ++checks;
    if (used + cost > budget.limit) continue;  // skip, keep scanning
    used += cost;
    mask.layers[static_cast<std::size_t>(ref.layer_ordinal)][static_cast<std::size_t>(ref.channel)] =
        1;
    mask.macs_per_sample += lc.per_channel_macs;
  }
  mask.slots = used;
  if (scan_checks != nullptr) *scan_checks = checks;
  return mask;
}

namespace {

std::vector<ChannelRef> pool_channels(const LayerPool& pool, const ChannelCostTable& table) {
  std::vector<ChannelRef> refs;
  for (int lo : pool.layers) {
    if (lo < 0 || lo >= static_cast<int>(table.layers.size())) {
      throw std::invalid_argument("layer pool index out of range");
    }
    for (int c = 0; c < table.layers[static_cast<std::size_t>(lo)].channels; ++c) {
      refs.push_back({lo, c});
    }
  }
  if (refs.empty()) throw std::invalid_argument("layer pool is empty");
  return refs;
}

}  // namespace

SelectionMask sample_random_fill(const LayerPool& pool, const ChannelCostTable& table,
                                 const Budget& budget, Rng& rng) {
  std::vector<ChannelRef> refs = pool_channels(pool, table);
  rng.shuffle(refs);
  return fill_by_order(refs, table, budget);
}

SelectionMask select_by_score(const std::vector<ChannelScore>& scores, const ChannelCostTable& table,
                              const Budget& budget, const LayerPool& pool, bool use_rgn) {
  std::vector<std::vector<double>> by_layer(table.layers.size());
  std::vector<std::vector<std::uint8_t>> present(table.layers.size());
  for (std::size_t i = 0; i < table.layers.size(); ++i) {
    by_layer[i].assign(static_cast<std::size_t>(table.layers[i].channels), 0.0);
    present[i].assign(static_cast<std::size_t>(table.layers[i].channels), 0);
  }
  for (const ChannelScore& s : scores) {
    by_layer[static_cast<std::size_t>(s.layer_ordinal)][static_cast<std::size_t>(s.channel)] =
        use_rgn ? s.rgn : s.raw_norm;
    present[static_cast<std::size_t>(s.layer_ordinal)][static_cast<std::size_t>(s.channel)] = 1;
  }
  std::vector<ChannelRef> refs = pool_channels(pool, table);
  for (const ChannelRef& r : refs) {
    if (!present[static_cast<std::size_t>(r.layer_ordinal)][static_cast<std::size_t>(r.channel)]) {
      std::ostringstream oss;
      oss << "select_by_score: missing score for layer " << r.layer_ordinal << " channel "
          << r.channel;
      throw std::invalid_argument(oss.str());
    }
  }
  std::stable_sort(refs.begin(), refs.end(), [&](const ChannelRef& a, const ChannelRef& b) {
    const double sa = by_layer[static_cast<std::size_t>(a.layer_ordinal)]
                              [static_cast<std::size_t>(a.channel)];
    const double sb = by_layer[static_cast<std::size_t>(b.layer_ordinal)]
                              [static_cast<std::size_t>(b.channel)];
    if (sa != sb) return sa > sb;
    if (a.layer_ordinal != b.layer_ordinal) return a.layer_ordinal < b.layer_ordinal;
    return a.channel < b.channel;
  });
  return fill_by_order(refs, table, budget);
}

LayerPool top_k_layers(const std::vector<double>& profile, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("top_k_layers: theta must be in (0,1]");
  }
  const auto curve = cumulative_rgn_curve(profile);  // throws on all-zero profile
  LayerPool pool;
  for (const auto& [layer, frac] : curve) {
    pool.layers.push_back(layer);
    if (frac >= theta - 1e-15) break;
  }
  return pool;
}

SelectionMask threshold_mask(const std::vector<ChannelScore>& scores,
                             const ChannelCostTable& table, double eps, bool use_rgn) {
  SelectionMask mask;
  for (const auto& l : table.layers) {
    mask.layers.emplace_back(static_cast<std::size_t>(l.channels), 0);
  }
  for (const ChannelScore& s : scores) {
    const double v = use_rgn ? s.rgn : s.raw_norm;
    if (v >= eps) {
      mask.layers[static_cast<std::size_t>(s.layer_ordinal)][static_cast<std::size_t>(s.channel)] =
          1;
    }
  }
  const SelectionCost sc = selection_cost(mask.layers, table);
  mask.slots = sc.slots;
  mask.macs_per_sample = sc.macs_per_sample;
  return mask;
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "full_random") return StrategyKind::FullRandom;
  if (s == "topk_random") return StrategyKind::TopKRandom;
  if (s == "det_rgn") return StrategyKind::DetRGN;
  if (s == "det_raw_norm") return StrategyKind::DetRawNorm;
  if (s == "threshold") return StrategyKind::Threshold;
  throw std::invalid_argument("unknown strategy kind: " + s);
}

StrategyMode strategy_mode_from_string(const std::string& s) {
  if (s == "static") return StrategyMode::Static;
  if (s == "dynamic") return StrategyMode::Dynamic;
  throw std::invalid_argument("unknown strategy mode: " + s);
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::FullRandom: return "full_random";
    case StrategyKind::TopKRandom: return "topk_random";
    case StrategyKind::DetRGN: return "det_rgn";
    case StrategyKind::DetRawNorm: return "det_raw_norm";
    case StrategyKind::Threshold: return "threshold";
  }
  return "?";
}

std::string to_string(StrategyMode m) {
  return m == StrategyMode::Static ? "static" : "dynamic";
}

SelectionMask strategy_step(StrategyState& state, const ChannelCostTable& table, int epoch,
                            const std::vector<ChannelScore>* profiling_scores) {
  (void)epoch;
  if (state.mode == StrategyMode::Static && state.static_mask.has_value()) {
    return *state.static_mask;
  }
  const bool needs_scores = state.kind == StrategyKind::DetRGN ||
                            state.kind == StrategyKind::DetRawNorm ||
                            state.kind == StrategyKind::Threshold;
  if (needs_scores && profiling_scores == nullptr) {
    throw std::invalid_argument("strategy_step: " + to_string(state.kind) +
                                " requires profiling gradients");
  }
  SelectionMask mask;
  switch (state.kind) {
    case StrategyKind::FullRandom:
    case StrategyKind::TopKRandom:
      mask = sample_random_fill(state.pool, table, state.budget, state.rng);
      break;
    case StrategyKind::DetRGN:
      mask = select_by_score(*profiling_scores, table, state.budget, state.pool, true);
      break;
    case StrategyKind::DetRawNorm:
      mask = select_by_score(*profiling_scores, table, state.budget, state.pool, false);
      break;
    case StrategyKind::Threshold:
      mask = threshold_mask(*profiling_scores, table, state.eps, state.threshold_on_rgn);
      break;
  }
  if (state.mode == StrategyMode::Static) state.static_mask = mask;
  return mask;
}

}  // namespace trady
