#include "trady/network.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace trady {

LayerSpec LayerSpec::conv(const ConvGeometry& g) {
  LayerSpec l;
  l.kind = Kind::Conv;
  l.geom = g;
  return l;
}
LayerSpec LayerSpec::relu() {
  LayerSpec l;
  l.kind = Kind::Relu;
  return l;
}
LayerSpec LayerSpec::residual_begin(int tag) {
  LayerSpec l;
  l.kind = Kind::ResidualBegin;
  l.tag = tag;
  return l;
}
LayerSpec LayerSpec::residual_add(int tag) {
  LayerSpec l;
  l.kind = Kind::ResidualAdd;
  l.tag = tag;
  return l;
}
LayerSpec LayerSpec::gap() {
  LayerSpec l;
  l.kind = Kind::GlobalAvgPool;
  return l;
}
LayerSpec LayerSpec::linear(int in, int out) {
  LayerSpec l;
  l.kind = Kind::Linear;
  l.in_features = in;
  l.out_features = out;
  return l;
}

namespace {

// Propagates the declared input shape through the layer list, checking
// residual tags and the trailing-classifier rule along the way.
std::vector<TensorShape> propagate(const NetworkSpec& spec) {
  if (spec.layers.empty()) throw std::invalid_argument("NetworkSpec: empty layer list");
  std::vector<TensorShape> inputs;
  inputs.reserve(spec.layers.size());
  std::map<int, TensorShape> residual_shape;
  TensorShape cur = spec.input;
  int linear_count = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    inputs.push_back(cur);
    switch (l.kind) {
      case LayerSpec::Kind::Conv: {
        l.geom.validate();
        if (l.geom.in_channels != cur.channels) {
          std::ostringstream oss;
          oss << "NetworkSpec: layer " << i << " expects " << l.geom.in_channels
              << " input channels, got " << cur.channels;
          throw std::invalid_argument(oss.str());
        }
        cur = {l.geom.out_channels, l.geom.out_dim(cur.h), l.geom.out_dim(cur.w)};
        break;
      }
      case LayerSpec::Kind::Relu:
        break;
      case LayerSpec::Kind::ResidualBegin:
        if (residual_shape.count(l.tag) != 0) {
          throw std::invalid_argument("NetworkSpec: duplicate ResidualBegin tag");
        }
        residual_shape[l.tag] = cur;
        break;
      case LayerSpec::Kind::ResidualAdd: {
        auto it = residual_shape.find(l.tag);
        if (it == residual_shape.end()) {
          std::ostringstream oss;
          oss << "NetworkSpec: ResidualAdd tag " << l.tag << " has no matching ResidualBegin";
          throw std::invalid_argument(oss.str());
        }
        if (!(it->second == cur)) {
          throw std::invalid_argument("NetworkSpec: residual branch shape mismatch at add");
        }
        residual_shape.erase(it);
        break;
      }
      case LayerSpec::Kind::GlobalAvgPool:
        cur = {cur.channels, 1, 1};
        break;
      case LayerSpec::Kind::Linear: {
        ++linear_count;
        if (i + 1 != spec.layers.size()) {
          throw std::invalid_argument("NetworkSpec: Linear must be the trailing classifier");
        }
        const int flat = cur.channels * cur.h * cur.w;
        if (l.in_features != flat) {
          std::ostringstream oss;
          oss << "NetworkSpec: classifier expects " << l.in_features << " features, got " << flat;
          throw std::invalid_argument(oss.str());
        }
        if (l.out_features < 1) throw std::invalid_argument("NetworkSpec: classifier out >= 1");
        break;
      }
    }
  }
  if (linear_count != 1) {
    throw std::invalid_argument("NetworkSpec: exactly one trailing Linear required");
  }
  if (!residual_shape.empty()) {
    throw std::invalid_argument("NetworkSpec: unmatched ResidualBegin tag");
  }
  return inputs;
}

}  // namespace

void NetworkSpec::validate() const { propagate(*this); }

std::vector<int> NetworkSpec::conv_layer_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerSpec::Kind::Conv) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<TensorShape> NetworkSpec::layer_inputs() const { return propagate(*this); }

ChannelCostTable make_cost_table(const NetworkSpec& spec) {
  const std::vector<TensorShape> inputs = spec.layer_inputs();
  ChannelCostTable table;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind != LayerSpec::Kind::Conv) continue;
    const TensorShape in = inputs[i];
    LayerCost lc;
    lc.layer_index = static_cast<int>(i);
    lc.channels = l.geom.in_channels;
    lc.per_channel = channel_cost(l.geom, in.h, in.w);
    lc.per_channel_macs = channel_macs(l.geom, l.geom.out_dim(in.h), l.geom.out_dim(in.w));
    table.layers.push_back(lc);
  }
  return table;
}

Parameters init_params(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  Parameters p;
  for (int li : spec.conv_layer_indices()) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(li)].geom;
    Tensor4 w(static_cast<std::size_t>(g.out_channels), static_cast<std::size_t>(g.in_per_group()),
              static_cast<std::size_t>(g.kernel), static_cast<std::size_t>(g.kernel));
    const double stddev =
        std::sqrt(2.0 / (static_cast<double>(g.in_per_group()) * g.kernel * g.kernel));
    for (double& v : w.raw()) v = stddev * rng.next_normal();
    p.conv_w.push_back(std::move(w));
  }
  const LayerSpec& fc = spec.layers.back();
  p.fc_w = Matrix(static_cast<std::size_t>(fc.out_features),
                  static_cast<std::size_t>(fc.in_features));
  const double stddev = std::sqrt(2.0 / static_cast<double>(fc.in_features));
  for (double& v : p.fc_w.data) v = stddev * rng.next_normal();
  p.fc_b.assign(static_cast<std::size_t>(fc.out_features), 0.0);
  return p;
}

SelectionMask full_mask(const NetworkSpec& spec) {
  SelectionMask m;
  const ChannelCostTable table = make_cost_table(spec);
  for (const auto& l : table.layers) {
    m.layers.emplace_back(static_cast<std::size_t>(l.channels), 1);
  }
  const SelectionCost sc = selection_cost(m.layers, table);
  m.slots = sc.slots;
  m.macs_per_sample = sc.macs_per_sample;
  return m;
}

SelectionMask empty_mask(const NetworkSpec& spec) {
  SelectionMask m;
  for (int li : spec.conv_layer_indices()) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(li)].geom;
    m.layers.emplace_back(static_cast<std::size_t>(g.in_channels), 0);
  }
  return m;
}

namespace {

void check_mask(const NetworkSpec& spec, const SelectionMask& mask) {
  const std::vector<int> convs = spec.conv_layer_indices();
  if (mask.layers.size() != convs.size()) {
    std::ostringstream oss;
    oss << "mask defines " << mask.layers.size() << " conv layers, network has " << convs.size();
    throw std::invalid_argument(oss.str());
  }
  for (std::size_t i = 0; i < convs.size(); ++i) {
    const int c = spec.layers[static_cast<std::size_t>(convs[i])].geom.in_channels;
    if (static_cast<int>(mask.layers[i].size()) != c) {
      std::ostringstream oss;
      oss << "mask layer " << i << " has " << mask.layers[i].size() << " channels, conv has " << c;
      throw std::invalid_argument(oss.str());
    }
  }
}

Matrix flatten_to_matrix(const Tensor4& t) {
  Matrix m(t.dim(0), t.dim(1) * t.dim(2) * t.dim(3));
  m.data = t.raw();
  return m;
}

Tensor4 matrix_to_tensor(const Matrix& m, const TensorShape& shape) {
  return Tensor4::from_data({m.rows, static_cast<std::size_t>(shape.channels),
                             static_cast<std::size_t>(shape.h), static_cast<std::size_t>(shape.w)},
                            m.data);
}

}  // namespace

ForwardResult forward(const NetworkSpec& spec, const Parameters& params, const Tensor4& batch,
                      const SelectionMask& mask) {
  check_mask(spec, mask);
  spec.validate();
  if (static_cast<int>(batch.dim(1)) != spec.input.channels ||
      static_cast<int>(batch.dim(2)) != spec.input.h ||
      static_cast<int>(batch.dim(3)) != spec.input.w) {
    std::ostringstream oss;
    oss << "forward: batch shape " << batch.shape_str() << " != declared input [*,"
        << spec.input.channels << "," << spec.input.h << "," << spec.input.w << "]";
    throw std::invalid_argument(oss.str());
  }
  if (params.conv_w.size() != static_cast<std::size_t>(spec.conv_count())) {
    throw std::invalid_argument("forward: parameter count != conv layer count");
  }

  const std::size_t B = batch.dim(0);
  ForwardResult res;
  res.cache.batch = static_cast<int>(B);

  Tensor4 x = batch;
  std::map<int, Tensor4> residual_saved;
  int conv_ordinal = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerSpec::Kind::Conv: {
        // Cache only the selected channels' input slices (Eq. 3 accounting).
        ActivationCache::ConvSlice slice;
        const auto& lane = mask.layers[static_cast<std::size_t>(conv_ordinal)];
        for (int c = 0; c < l.geom.in_channels; ++c) {
          if (lane[static_cast<std::size_t>(c)]) slice.channels.push_back(c);
        }
        const std::size_t H = x.dim(2), W = x.dim(3);
        slice.stored = Tensor4(B, slice.channels.size(), H, W);
        for (std::size_t b = 0; b < B; ++b) {
          for (std::size_t sc = 0; sc < slice.channels.size(); ++sc) {
            const std::size_t c = static_cast<std::size_t>(slice.channels[sc]);
            for (std::size_t h = 0; h < H; ++h) {
              for (std::size_t w = 0; w < W; ++w) {
                slice.stored.at(b, sc, h, w) = x.at(b, c, h, w);
              }
            }
          }
        }
        res.cache.stored_activation_slots +=
            static_cast<std::uint64_t>(slice.channels.size()) * H * W;
        res.cache.conv.push_back(std::move(slice));
        x = conv2d_forward(x, params.conv_w[static_cast<std::size_t>(conv_ordinal)], l.geom);
        ++conv_ordinal;
        break;
      }
      case LayerSpec::Kind::Relu: {
        ReluResult r = relu_forward(x);
        x = std::move(r.output);
        res.cache.relu_active.push_back(std::move(r.active));
        break;
      }
      case LayerSpec::Kind::ResidualBegin:
        residual_saved.emplace(l.tag, x);
        break;
      case LayerSpec::Kind::ResidualAdd: {
        x = residual_add_forward(x, residual_saved.at(l.tag));
        residual_saved.erase(l.tag);
        break;
      }
      case LayerSpec::Kind::GlobalAvgPool:
        x = gap_forward(x);
        break;
      case LayerSpec::Kind::Linear: {
        res.cache.classifier_input = flatten_to_matrix(x);
        res.logits = linear_forward(res.cache.classifier_input, params.fc_w, params.fc_b);
        break;
      }
    }
  }
  return res;
}

GradientSet backward(const NetworkSpec& spec, const Parameters& params,
                     const ActivationCache& cache, const Matrix& dlogits,
                     const SelectionMask& mask) {
  check_mask(spec, mask);
  const std::vector<TensorShape> inputs = spec.layer_inputs();
  const std::vector<int> convs = spec.conv_layer_indices();
  if (cache.conv.size() != convs.size()) {
    throw std::invalid_argument("backward: cache/mask mismatch (conv slice count)");
  }
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    std::vector<int> expect;
    const auto& lane = mask.layers[ci];
    for (int c = 0; c < static_cast<int>(lane.size()); ++c) {
      if (lane[static_cast<std::size_t>(c)]) expect.push_back(c);
    }
    if (cache.conv[ci].channels != expect) {
      throw std::invalid_argument("backward: cache was produced with a different mask");
    }
  }

  GradientSet grads;
  grads.conv_grads.reserve(convs.size());
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(convs[ci])].geom;
    grads.conv_grads.emplace_back(static_cast<std::size_t>(g.out_channels),
                                  static_cast<std::size_t>(g.in_per_group()),
                                  static_cast<std::size_t>(g.kernel),
                                  static_cast<std::size_t>(g.kernel));
    grads.computed.emplace_back(static_cast<std::size_t>(g.in_channels), 0);
  }

  // Shallowest layer whose weight gradient is needed; propagation below it
  // has no consumer and is skipped.
  int stop_layer = static_cast<int>(spec.layers.size()) - 1;
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    bool any = false;
    for (std::uint8_t m : mask.layers[ci]) any |= (m != 0);
    if (any) {
      stop_layer = convs[ci];
      break;
    }
  }

  // Ordinal maps for the reverse walk.
  std::vector<int> conv_ordinal(spec.layers.size(), -1);
  std::vector<int> relu_ordinal(spec.layers.size(), -1);
  {
    int c = 0, r = 0;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
      if (spec.layers[i].kind == LayerSpec::Kind::Conv) conv_ordinal[i] = c++;
      if (spec.layers[i].kind == LayerSpec::Kind::Relu) relu_ordinal[i] = r++;
    }
    if (cache.relu_active.size() != static_cast<std::size_t>(r)) {
      throw std::invalid_argument("backward: cache relu indicator count mismatch");
    }
  }

  const std::size_t B = static_cast<std::size_t>(cache.batch);
  Tensor4 grad;
  std::map<int, Tensor4> skip_grads;
  for (int i = static_cast<int>(spec.layers.size()) - 1; i >= stop_layer; --i) {
    const LayerSpec& l = spec.layers[static_cast<std::size_t>(i)];
    switch (l.kind) {
      case LayerSpec::Kind::Linear: {
        LinearGrad lg = linear_backward(cache.classifier_input, params.fc_w, dlogits);
        grads.fc_dw = std::move(lg.dweight);
        grads.fc_db = std::move(lg.dbias);
        if (i > stop_layer) {
          grad = matrix_to_tensor(lg.dinput, inputs[static_cast<std::size_t>(i)]);
        }
        break;
      }
      case LayerSpec::Kind::GlobalAvgPool: {
        const TensorShape in = inputs[static_cast<std::size_t>(i)];
        grad = gap_backward(grad, in.h, in.w);
        break;
      }
      case LayerSpec::Kind::Relu:
        grad = relu_backward(cache.relu_active[static_cast<std::size_t>(relu_ordinal
                                 [static_cast<std::size_t>(i)])],
                             grad);
        break;
      case LayerSpec::Kind::ResidualAdd:
        skip_grads.emplace(l.tag, grad);
        break;
      case LayerSpec::Kind::ResidualBegin: {
        auto it = skip_grads.find(l.tag);
        if (it != skip_grads.end()) {
          double* d = grad.data();
          const double* s = it->second.data();
          for (std::size_t k = 0; k < grad.size(); ++k) d[k] += s[k];
          skip_grads.erase(it);
        }
        break;
      }
      case LayerSpec::Kind::Conv: {
        const int ci = conv_ordinal[static_cast<std::size_t>(i)];
        const TensorShape in = inputs[static_cast<std::size_t>(i)];
        const auto& lane = mask.layers[static_cast<std::size_t>(ci)];
        const ActivationCache::ConvSlice& slice = cache.conv[static_cast<std::size_t>(ci)];
        if (!slice.channels.empty()) {
          // Rebuild a full-width input view from the cached slices; the
          // masked kernel never reads the unselected (zero) planes.
          Tensor4 full(B, static_cast<std::size_t>(in.channels), static_cast<std::size_t>(in.h),
                       static_cast<std::size_t>(in.w));
          for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t sc = 0; sc < slice.channels.size(); ++sc) {
              const std::size_t c = static_cast<std::size_t>(slice.channels[sc]);
              for (int h = 0; h < in.h; ++h) {
                for (int w = 0; w < in.w; ++w) {
                  full.at(b, c, static_cast<std::size_t>(h), static_cast<std::size_t>(w)) =
                      slice.stored.at(b, sc, static_cast<std::size_t>(h),
                                      static_cast<std::size_t>(w));
                }
              }
            }
          }
          MaskedWeightGrad wg = conv2d_weight_grad_masked(full, grad, l.geom, lane);
          grads.conv_grads[static_cast<std::size_t>(ci)] = std::move(wg.grad);
          grads.computed[static_cast<std::size_t>(ci)] = std::move(wg.computed);
          grads.wgrad_macs += wg.macs;
        }
        if (i > stop_layer) {
          grad = conv2d_input_grad(params.conv_w[static_cast<std::size_t>(ci)], grad, l.geom,
                                   in.h, in.w, static_cast<int>(B));
        }
        break;
      }
    }
  }
  return grads;
}

void sgd_step(Parameters& params, const GradientSet& grads, double lr) {
  if (lr < 0.0) throw std::invalid_argument("sgd_step: negative learning rate");
  for (std::size_t ci = 0; ci < params.conv_w.size(); ++ci) {
    Tensor4& w = params.conv_w[ci];
    const Tensor4& g = grads.conv_grads[ci];
    const auto& flags = grads.computed[ci];
    const std::size_t cpg = w.dim(1);
    const std::size_t opg = w.dim(0) / (flags.size() / cpg);
    for (std::size_t c = 0; c < flags.size(); ++c) {
      if (!flags[c]) continue;
      const std::size_t gi = c / cpg;
      const std::size_t cl = c % cpg;
      for (std::size_t oo = 0; oo < opg; ++oo) {
        const std::size_t co = gi * opg + oo;
        for (std::size_t k = 0; k < w.dim(2); ++k) {
          for (std::size_t ll = 0; ll < w.dim(3); ++ll) {
            w.at(co, cl, k, ll) -= lr * g.at(co, cl, k, ll);
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < params.fc_w.data.size(); ++i) {
    params.fc_w.data[i] -= lr * grads.fc_dw.data[i];
  }
  for (std::size_t i = 0; i < params.fc_b.size(); ++i) params.fc_b[i] -= lr * grads.fc_db[i];
}

double cosine_warmup_lr(int epoch, int total_epochs, int warmup_epochs, double lr_max) {
  if (warmup_epochs >= total_epochs) {
    throw std::invalid_argument("cosine_warmup_lr: warmup_epochs must be < total_epochs");
  }
  if (warmup_epochs < 0 || epoch < 0 || epoch >= total_epochs) {
    throw std::invalid_argument("cosine_warmup_lr: epoch out of range");
  }
  if (lr_max < 0.0) throw std::invalid_argument("cosine_warmup_lr: lr_max must be >= 0");
  if (epoch < warmup_epochs) {
    return lr_max * static_cast<double>(epoch) / static_cast<double>(warmup_epochs);
  }
  const double t = static_cast<double>(epoch - warmup_epochs) /
                   static_cast<double>(total_epochs - warmup_epochs);
  return 0.5 * lr_max * (1.0 + std::cos(M_PI * t));
}

NetworkSpec toynet_residual_spec(int in_channels, int hw, int classes, int width) {
  ConvGeometry stem{in_channels, width, 3, 1, 1, 1, 1};
  ConvGeometry dw{width, width, 3, 1, 1, 1, width};
  ConvGeometry pw{width, width, 1, 1, 0, 1, 1};
  ConvGeometry down{width, 2 * width, 3, 2, 1, 1, 1};

  NetworkSpec spec;
  spec.input = {in_channels, hw, hw};
  spec.layers = {LayerSpec::conv(stem), LayerSpec::relu()};
  for (int blk = 0; blk < 2; ++blk) {
    spec.layers.push_back(LayerSpec::residual_begin(blk));
    spec.layers.push_back(LayerSpec::conv(dw));
    spec.layers.push_back(LayerSpec::relu());
    spec.layers.push_back(LayerSpec::conv(pw));
    spec.layers.push_back(LayerSpec::residual_add(blk));
  }
  spec.layers.push_back(LayerSpec::conv(down));
  spec.layers.push_back(LayerSpec::relu());
  spec.layers.push_back(LayerSpec::gap());
  spec.layers.push_back(LayerSpec::linear(2 * width, classes));
  spec.validate();
  return spec;
}

NetworkSpec toynet_wide_spec(int in_channels, int hw, int classes, int width) {
  ConvGeometry stem{in_channels, width, 3, 1, 1, 1, 1};
  ConvGeometry pw{width, width, 1, 1, 0, 1, 1};

  NetworkSpec spec;
  spec.input = {in_channels, hw, hw};
  spec.layers = {LayerSpec::conv(stem),  LayerSpec::relu(), LayerSpec::conv(pw),
                 LayerSpec::relu(),      LayerSpec::conv(pw), LayerSpec::relu(),
                 LayerSpec::gap(),       LayerSpec::linear(width, classes)};
  spec.validate();
  return spec;
}

NetworkSpec make_network(const std::string& name, int in_channels, int hw, int classes,
                         int width) {
  if (name == "toynet-residual") return toynet_residual_spec(in_channels, hw, classes, width);
  if (name == "toynet-wide") return toynet_wide_spec(in_channels, hw, classes, width);
  throw std::invalid_argument("unknown network name: " + name);
}

}  // namespace trady
