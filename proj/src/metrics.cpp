#include "trady/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trady {

double channel_grad_norm(const Tensor4& wgrad, const ConvGeometry& geom, int channel,
                         const std::vector<std::uint8_t>& computed) {
  if (channel < 0 || channel >= geom.in_channels) {
    throw std::invalid_argument("channel_grad_norm: channel out of range");
  }
  if (!computed[static_cast<std::size_t>(channel)]) {
    std::ostringstream oss;
    oss << "channel_grad_norm: channel " << channel << " was not computed (frozen)";
    throw std::invalid_argument(oss.str());
  }
  const int cpg = geom.in_per_group();
  const int opg = geom.out_per_group();
  const int gi = geom.group_of_input_channel(channel);
  const std::size_t cl = static_cast<std::size_t>(channel % cpg);
  double acc = 0.0;
  for (int oo = 0; oo < opg; ++oo) {
    const std::size_t co = static_cast<std::size_t>(gi * opg + oo);
    for (int k = 0; k < geom.kernel; ++k) {
      for (int l = 0; l < geom.kernel; ++l) {
        const double v = wgrad.at(co, cl, static_cast<std::size_t>(k), static_cast<std::size_t>(l));
        acc += v * v;
      }
    }
  }
  return std::sqrt(acc);
}

double channel_rgn(double raw_norm, const ChannelCost& cost) {
  if (cost.total() == 0) throw std::invalid_argument("channel_rgn: zero channel cost");
  return raw_norm / static_cast<double>(cost.total());
}

double layer_rgn(const Tensor4& wgrad, const ConvGeometry& geom, const ChannelCost& cost,
                 const std::vector<std::uint8_t>& computed) {
  double sum_rgn = 0.0;
  double sum_raw = 0.0;
  for (int c = 0; c < geom.in_channels; ++c) {
    const double raw = channel_grad_norm(wgrad, geom, c, computed);
    sum_rgn += channel_rgn(raw, cost);
    sum_raw += raw;
  }
  const double alt = sum_raw / static_cast<double>(cost.total());
  if (std::abs(sum_rgn - alt) > 1e-12 * std::max(1.0, std::abs(alt))) {
    throw std::runtime_error("layer_rgn: two-form identity violated");
  }
  return sum_rgn;
}

std::vector<std::pair<int, double>> cumulative_rgn_curve(const std::vector<double>& profile) {
  double total = 0.0;
  for (double v : profile) {
    if (v < 0.0) throw std::invalid_argument("cumulative_rgn_curve: negative profile entry");
    total += v;
  }
  if (total <= 0.0) throw std::invalid_argument("cumulative_rgn_curve: all-zero profile");
  std::vector<int> order(profile.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (profile[static_cast<std::size_t>(a)] != profile[static_cast<std::size_t>(b)]) {
      return profile[static_cast<std::size_t>(a)] > profile[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  std::vector<std::pair<int, double>> curve;
  curve.reserve(order.size());
  double acc = 0.0;
  for (int idx : order) {
    acc += profile[static_cast<std::size_t>(idx)];
    curve.emplace_back(idx, acc / total);
  }
  return curve;
}

std::vector<ChannelScore> score_all_channels(const NetworkSpec& spec, const GradientSet& grads,
                                             const ChannelCostTable& table) {
  const std::vector<int> convs = spec.conv_layer_indices();
  std::vector<ChannelScore> scores;
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(convs[ci])].geom;
    for (int c = 0; c < g.in_channels; ++c) {
      ChannelScore s;
      s.layer_ordinal = static_cast<int>(ci);
      s.channel = c;
      s.raw_norm = channel_grad_norm(grads.conv_grads[ci], g, c, grads.computed[ci]);
      s.rgn = channel_rgn(s.raw_norm, table.layers[ci].per_channel);
      scores.push_back(s);
    }
  }
  return scores;
}

}  // namespace trady
