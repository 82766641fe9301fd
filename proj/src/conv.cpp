#include "trady/conv.hpp"

#include <sstream>
#include <stdexcept>

#include "trady/parallel.hpp"

namespace trady {

namespace {

void check_weight_shape(const Tensor4& weights, const ConvGeometry& g) {
  if (static_cast<int>(weights.dim(0)) != g.out_channels ||
      static_cast<int>(weights.dim(1)) != g.in_per_group() ||
      static_cast<int>(weights.dim(2)) != g.kernel ||
      static_cast<int>(weights.dim(3)) != g.kernel) {
    std::ostringstream oss;
    oss << "conv2d: weight shape " << weights.shape_str() << " != expected [" << g.out_channels
        << "," << g.in_per_group() << "," << g.kernel << "," << g.kernel << "]";
    throw std::invalid_argument(oss.str());
  }
}

void check_input_channels(const Tensor4& input, const ConvGeometry& g) {
  if (static_cast<int>(input.dim(1)) != g.in_channels) {
    std::ostringstream oss;
    oss << "conv2d: input channel dim " << input.dim(1) << " != geometry in_channels "
        << g.in_channels;
    throw std::invalid_argument(oss.str());
  }
}

void check_upstream_shape(const Tensor4& upstream, const ConvGeometry& g, int batch, int ho,
                          int wo) {
  if (static_cast<int>(upstream.dim(0)) != batch ||
      static_cast<int>(upstream.dim(1)) != g.out_channels ||
      static_cast<int>(upstream.dim(2)) != ho || static_cast<int>(upstream.dim(3)) != wo) {
    std::ostringstream oss;
    oss << "conv2d: upstream shape " << upstream.shape_str() << " != expected [" << batch << ","
        << g.out_channels << "," << ho << "," << wo << "]";
    throw std::invalid_argument(oss.str());
  }
}

// Zero-padded copy of one sample channel plane.
struct PaddedPlane {
  std::vector<double> data;
  int w = 0;
  double at(int h, int ww) const { return data[static_cast<std::size_t>(h) * w + ww]; }
};

PaddedPlane pad_plane(const Tensor4& input, std::size_t b, std::size_t c, int pad) {
  const int h = static_cast<int>(input.dim(2));
  const int w = static_cast<int>(input.dim(3));
  PaddedPlane p;
  p.w = w + 2 * pad;
  p.data.assign(static_cast<std::size_t>(h + 2 * pad) * p.w, 0.0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      p.data[static_cast<std::size_t>(i + pad) * p.w + (j + pad)] = input.at(b, c, i, j);
    }
  }
  return p;
}

}  // namespace

Tensor4 conv2d_forward(const Tensor4& input, const Tensor4& weights, const ConvGeometry& g) {
  g.validate();
  check_input_channels(input, g);
  check_weight_shape(weights, g);
  const int B = static_cast<int>(input.dim(0));
  const int H = static_cast<int>(input.dim(2));
  const int W = static_cast<int>(input.dim(3));
  const int Ho = g.out_dim(H);
  const int Wo = g.out_dim(W);
  const int cpg = g.in_per_group();
  const int opg = g.out_per_group();

  Tensor4 out(B, g.out_channels, Ho, Wo);
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    for (int gi = 0; gi < g.groups; ++gi) {
      for (int cl = 0; cl < cpg; ++cl) {
        const std::size_t c = static_cast<std::size_t>(gi * cpg + cl);
        const PaddedPlane plane = pad_plane(input, b, c, g.padding);
        for (int oo = 0; oo < opg; ++oo) {
          const std::size_t co = static_cast<std::size_t>(gi * opg + oo);
          for (int ho = 0; ho < Ho; ++ho) {
            for (int wo = 0; wo < Wo; ++wo) {
              double acc = out.at(b, co, ho, wo);
              for (int k = 0; k < g.kernel; ++k) {
                const int hi = ho * g.stride + k * g.dilation;
                for (int l = 0; l < g.kernel; ++l) {
                  acc += plane.at(hi, wo * g.stride + l * g.dilation) * weights.at(co, cl, k, l);
                }
              }
              out.at(b, co, ho, wo) = acc;
            }
          }
        }
      }
    }
  });
  out.check_finite("conv2d_forward");
  return out;
}

MaskedWeightGrad conv2d_weight_grad_masked(const Tensor4& input, const Tensor4& upstream,
                                           const ConvGeometry& g,
                                           const std::vector<std::uint8_t>& mask) {
  g.validate();
  check_input_channels(input, g);
  if (static_cast<int>(mask.size()) != g.in_channels) {
    std::ostringstream oss;
    oss << "conv2d_weight_grad_masked: mask length " << mask.size() << " != in_channels "
        << g.in_channels;
    throw std::invalid_argument(oss.str());
  }
  const int B = static_cast<int>(input.dim(0));
  const int H = static_cast<int>(input.dim(2));
  const int W = static_cast<int>(input.dim(3));
  const int Ho = g.out_dim(H);
  const int Wo = g.out_dim(W);
  check_upstream_shape(upstream, g, B, Ho, Wo);
  const int cpg = g.in_per_group();
  const int opg = g.out_per_group();

  MaskedWeightGrad result;
  result.grad = Tensor4(g.out_channels, cpg, g.kernel, g.kernel);
  result.computed.assign(static_cast<std::size_t>(g.in_channels), 0);

  std::vector<int> selected;
  for (int c = 0; c < g.in_channels; ++c) {
    if (mask[static_cast<std::size_t>(c)]) selected.push_back(c);
  }
  std::vector<std::uint64_t> macs_per(selected.size(), 0);

  // One input channel at a time; writes land in disjoint weight columns, so
  // channel-level parallelism keeps results bit-identical.
  parallel_for(selected.size(), [&](std::size_t si) {
    const int c = selected[si];
    const int gi = g.group_of_input_channel(c);
    const int cl = c % cpg;
    std::vector<PaddedPlane> planes;
    planes.reserve(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
      planes.push_back(pad_plane(input, static_cast<std::size_t>(b), static_cast<std::size_t>(c),
                                 g.padding));
    }
    std::uint64_t macs = 0;
    for (int oo = 0; oo < opg; ++oo) {
      const std::size_t co = static_cast<std::size_t>(gi * opg + oo);
      for (int k = 0; k < g.kernel; ++k) {
        for (int l = 0; l < g.kernel; ++l) {
          double acc = 0.0;
          for (int b = 0; b < B; ++b) {
            const PaddedPlane& plane = planes[static_cast<std::size_t>(b)];
            for (int ho = 0; ho < Ho; ++ho) {
              const int hi = ho * g.stride + k * g.dilation;
              for (int wo = 0; wo < Wo; ++wo) {
                acc += plane.at(hi, wo * g.stride + l * g.dilation) *
                       upstream.at(static_cast<std::size_t>(b), co, static_cast<std::size_t>(ho),
                                   static_cast<std::size_t>(wo));
              }
              macs += static_cast<std::uint64_t>(Wo);
            }
          }
          result.grad.at(co, static_cast<std::size_t>(cl), static_cast<std::size_t>(k),
                         static_cast<std::size_t>(l)) = acc;
        }
      }
    }
    macs_per[si] = macs;
    result.computed[static_cast<std::size_t>(c)] = 1;
  });
  for (std::uint64_t m : macs_per) result.macs += m;
  result.grad.check_finite("conv2d_weight_grad_masked");
  return result;
}

Tensor4 conv2d_input_grad(const Tensor4& weights, const Tensor4& upstream, const ConvGeometry& g,
                          int in_h, int in_w, int batch) {
  g.validate();
  check_weight_shape(weights, g);
  const int Ho = g.out_dim(in_h);
  const int Wo = g.out_dim(in_w);
  check_upstream_shape(upstream, g, batch, Ho, Wo);
  const int cpg = g.in_per_group();
  const int opg = g.out_per_group();

  Tensor4 dx(batch, g.in_channels, in_h, in_w);
  parallel_for(static_cast<std::size_t>(batch), [&](std::size_t b) {
    for (int gi = 0; gi < g.groups; ++gi) {
      for (int oo = 0; oo < opg; ++oo) {
        const std::size_t co = static_cast<std::size_t>(gi * opg + oo);
        for (int ho = 0; ho < Ho; ++ho) {
          for (int wo = 0; wo < Wo; ++wo) {
            const double u = upstream.at(b, co, static_cast<std::size_t>(ho),
                                         static_cast<std::size_t>(wo));
            for (int cl = 0; cl < cpg; ++cl) {
              const std::size_t c = static_cast<std::size_t>(gi * cpg + cl);
              for (int k = 0; k < g.kernel; ++k) {
                const int hi = ho * g.stride + k * g.dilation - g.padding;
                if (hi < 0 || hi >= in_h) continue;
                for (int l = 0; l < g.kernel; ++l) {
                  const int wi = wo * g.stride + l * g.dilation - g.padding;
                  if (wi < 0 || wi >= in_w) continue;
                  dx.at(b, c, static_cast<std::size_t>(hi), static_cast<std::size_t>(wi)) +=
                      weights.at(co, static_cast<std::size_t>(cl), static_cast<std::size_t>(k),
                                 static_cast<std::size_t>(l)) *
                      u;
                }
              }
            }
          }
        }
      }
    }
  });
  dx.check_finite("conv2d_input_grad");
  return dx;
}

}  // namespace trady
