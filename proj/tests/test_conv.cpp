#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_support.hpp"
#include "trady/conv.hpp"

using namespace trady;
using testutil::max_abs_diff;
using testutil::random_tensor;

TEST_CASE("conv2d_forward: scalar 1x1 kernel scales the input") {
  Tensor4 input(1, 1, 2, 2);
  for (double& v : input.raw()) v = 1.0;
  Tensor4 w(1, 1, 1, 1);
  w.at(0, 0, 0, 0) = 3.0;
  ConvGeometry g{1, 1, 1, 1, 0, 1, 1};
  const Tensor4 out = conv2d_forward(input, w, g);
  REQUIRE(out.shape() == std::array<std::size_t, 4>{1, 1, 2, 2});
  for (double v : out.raw()) CHECK(v == 3.0);
}

TEST_CASE("conv2d_forward: padded 3x3 matches brute-force oracle") {
  Tensor4 input(1, 1, 3, 3);
  input.at(0, 0, 1, 1) = 1.0;  // center one
  Tensor4 w(1, 1, 3, 3);
  for (double& v : w.raw()) v = 1.0;
  ConvGeometry g{1, 1, 3, 1, 1, 1, 1};
  const Tensor4 out = conv2d_forward(input, w, g);
  const Tensor4 ref = oracle::conv_forward(input, w, g);
  CHECK(max_abs_diff(out, ref) == 0.0);
  // all-ones kernel over a single center spike: every position covered by
  // the center sees exactly 1
  for (double v : out.raw()) CHECK(v == 1.0);
}

TEST_CASE("conv2d_forward: depthwise groups are independent") {
  Rng rng(11);
  Tensor4 input = random_tensor(2, 2, 4, 4, rng);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t h = 0; h < 4; ++h)
      for (std::size_t w = 0; w < 4; ++w) input.at(b, 0, h, w) = 0.0;  // zero channel 0
  Tensor4 w = random_tensor(2, 1, 3, 3, rng);
  ConvGeometry g{2, 2, 3, 1, 1, 1, 2};
  const Tensor4 out = conv2d_forward(input, w, g);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t h = 0; h < 4; ++h)
      for (std::size_t ww = 0; ww < 4; ++ww) CHECK(out.at(b, 0, h, ww) == 0.0);
}

TEST_CASE("conv2d_forward: random geometries match the oracle") {
  Rng rng(42);
  struct Case {
    int C, Cp, D, stride, pad, dil, groups, H, W, B;
  };
  const Case cases[] = {
      {3, 4, 3, 1, 1, 1, 1, 5, 5, 2}, {4, 4, 3, 2, 1, 1, 4, 6, 6, 1},
      {4, 6, 2, 1, 0, 2, 2, 7, 5, 2}, {1, 3, 1, 1, 0, 1, 1, 4, 4, 3},
      {6, 6, 3, 2, 2, 1, 3, 8, 8, 2},
  };
  for (const Case& c : cases) {
    ConvGeometry g{c.C, c.Cp, c.D, c.stride, c.pad, c.dil, c.groups};
    Tensor4 input = random_tensor(c.B, c.C, c.H, c.W, rng);
    Tensor4 w = random_tensor(c.Cp, c.C / c.groups, c.D, c.D, rng);
    CHECK(max_abs_diff(conv2d_forward(input, w, g), oracle::conv_forward(input, w, g)) <= 1e-14);
  }
}

TEST_CASE("conv2d_forward: shape errors name the offending dimension") {
  Tensor4 input(1, 2, 4, 4);
  Tensor4 w(1, 1, 1, 1);
  ConvGeometry g{1, 1, 1, 1, 0, 1, 1};
  CHECK_THROWS_WITH_AS(conv2d_forward(input, w, g),
                       doctest::Contains("input channel dim"), std::invalid_argument);
  ConvGeometry g2{2, 3, 3, 1, 0, 1, 1};
  CHECK_THROWS_WITH_AS(conv2d_forward(input, w, g2), doctest::Contains("weight shape"),
                       std::invalid_argument);
}

TEST_CASE("conv2d_weight_grad_masked: all-ones 1x1 case sums to 4") {
  Tensor4 input(1, 1, 2, 2);
  Tensor4 up(1, 1, 2, 2);
  for (double& v : input.raw()) v = 1.0;
  for (double& v : up.raw()) v = 1.0;
  ConvGeometry g{1, 1, 1, 1, 0, 1, 1};
  const MaskedWeightGrad r = conv2d_weight_grad_masked(input, up, g, {1});
  CHECK(r.grad.at(0, 0, 0, 0) == 4.0);
  CHECK(r.computed[0] == 1);
  CHECK(r.macs == 4);
}

TEST_CASE("conv2d_weight_grad_masked: masked-out channel is zero and unflagged") {
  Tensor4 input(1, 1, 2, 2);
  Tensor4 up(1, 1, 2, 2);
  for (double& v : input.raw()) v = 1.0;
  for (double& v : up.raw()) v = 1.0;
  ConvGeometry g{1, 1, 1, 1, 0, 1, 1};
  const MaskedWeightGrad r = conv2d_weight_grad_masked(input, up, g, {0});
  CHECK(r.grad.at(0, 0, 0, 0) == 0.0);
  CHECK(r.computed[0] == 0);
  CHECK(r.macs == 0);
}

TEST_CASE("conv2d_weight_grad_masked: selected slices match dense, others exactly zero") {
  Rng rng(7);
  Tensor4 input = random_tensor(1, 3, 5, 5, rng);
  ConvGeometry g{3, 4, 3, 1, 1, 1, 1};
  Tensor4 w = random_tensor(4, 3, 3, 3, rng);
  Tensor4 up = random_tensor(1, 4, 5, 5, rng);
  const std::vector<std::uint8_t> mask = {1, 0, 1};
  const MaskedWeightGrad masked = conv2d_weight_grad_masked(input, up, g, mask);
  const MaskedWeightGrad dense = conv2d_weight_grad_masked(input, up, g, {1, 1, 1});
  const Tensor4 ref = oracle::conv_weight_grad(input, up, g);
  for (std::size_t co = 0; co < 4; ++co)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          if (mask[c]) {
            CHECK(std::abs(masked.grad.at(co, c, k, l) - dense.grad.at(co, c, k, l)) <= 1e-12);
            CHECK(std::abs(masked.grad.at(co, c, k, l) - ref.at(co, c, k, l)) <= 1e-12);
          } else {
            CHECK(masked.grad.at(co, c, k, l) == 0.0);
          }
        }
  CHECK(masked.computed == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(masked.macs == 2u * 9 * 4 * 5 * 5);  // 2 channels x D^2 C' H' W'
}

TEST_CASE("conv2d_weight_grad_masked: masked-equals-dense over random masks") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    ConvGeometry g{4, 6, 3, trial % 2 + 1, 1, 1, 2};
    Tensor4 input = random_tensor(2, 4, 6, 6, rng);
    const int ho = g.out_dim(6);
    Tensor4 up = random_tensor(2, 6, ho, ho, rng);
    std::vector<std::uint8_t> mask(4);
    for (auto& m : mask) m = rng.next_below(2) != 0;
    const MaskedWeightGrad masked = conv2d_weight_grad_masked(input, up, g, mask);
    const MaskedWeightGrad dense = conv2d_weight_grad_masked(input, up, g, {1, 1, 1, 1});
    for (std::size_t co = 0; co < 6; ++co)
      for (std::size_t cl = 0; cl < 2; ++cl)
        for (std::size_t k = 0; k < 3; ++k)
          for (std::size_t l = 0; l < 3; ++l) {
            const std::size_t c = (co / 3) * 2 + cl;  // group of co, local channel
            if (mask[c]) {
              CHECK(std::abs(masked.grad.at(co, cl, k, l) - dense.grad.at(co, cl, k, l)) <=
                    1e-12);
            } else {
              CHECK(masked.grad.at(co, cl, k, l) == 0.0);
            }
          }
  }
}

TEST_CASE("conv2d_weight_grad_masked: linear in the upstream") {
  Rng rng(5);
  ConvGeometry g{2, 3, 3, 1, 1, 1, 1};
  Tensor4 input = random_tensor(2, 2, 5, 5, rng);
  Tensor4 u1 = random_tensor(2, 3, 5, 5, rng);
  Tensor4 u2 = random_tensor(2, 3, 5, 5, rng);
  const double lambda = 2.75;
  Tensor4 combo(2, 3, 5, 5);
  for (std::size_t i = 0; i < combo.size(); ++i) {
    combo.raw()[i] = u1.raw()[i] + lambda * u2.raw()[i];
  }
  const std::vector<std::uint8_t> mask = {1, 1};
  const Tensor4 g1 = conv2d_weight_grad_masked(input, u1, g, mask).grad;
  const Tensor4 g2 = conv2d_weight_grad_masked(input, u2, g, mask).grad;
  const Tensor4 gc = conv2d_weight_grad_masked(input, combo, g, mask).grad;
  for (std::size_t i = 0; i < gc.size(); ++i) {
    CHECK(std::abs(gc.raw()[i] - (g1.raw()[i] + lambda * g2.raw()[i])) <= 1e-12);
  }
}

TEST_CASE("conv2d_weight_grad_masked: group independence under perturbation") {
  Rng rng(13);
  ConvGeometry g{4, 4, 3, 1, 1, 1, 2};  // 2 groups of 2
  Tensor4 input = random_tensor(1, 4, 5, 5, rng);
  Tensor4 up = random_tensor(1, 4, 5, 5, rng);
  const std::vector<std::uint8_t> all(4, 1);
  const Tensor4 base = conv2d_weight_grad_masked(input, up, g, all).grad;
  // Perturb upstream channels of group 1 only; group-0 input channel slices
  // (weight rows 0,1) must be bit-unchanged.
  Tensor4 up2 = up;
  for (std::size_t h = 0; h < 5; ++h)
    for (std::size_t w = 0; w < 5; ++w) {
      up2.at(0, 2, h, w) += 1.0;
      up2.at(0, 3, h, w) -= 0.5;
    }
  const Tensor4 pert = conv2d_weight_grad_masked(input, up2, g, all).grad;
  for (std::size_t co = 0; co < 2; ++co)
    for (std::size_t cl = 0; cl < 2; ++cl)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) CHECK(base.at(co, cl, k, l) == pert.at(co, cl, k, l));
}

TEST_CASE("conv2d_weight_grad_masked: mask length error") {
  Tensor4 input(1, 2, 3, 3);
  Tensor4 up(1, 1, 3, 3);
  ConvGeometry g{2, 1, 1, 1, 0, 1, 1};
  CHECK_THROWS_AS(conv2d_weight_grad_masked(input, up, g, {1}), std::invalid_argument);
}

TEST_CASE("conv2d_input_grad: 1x1 kernel scales the upstream") {
  Rng rng(3);
  Tensor4 up = random_tensor(2, 1, 3, 3, rng);
  Tensor4 w(1, 1, 1, 1);
  w.at(0, 0, 0, 0) = -1.5;
  ConvGeometry g{1, 1, 1, 1, 0, 1, 1};
  const Tensor4 dx = conv2d_input_grad(w, up, g, 3, 3, 2);
  for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx.raw()[i] == -1.5 * up.raw()[i]);
}

TEST_CASE("conv2d_input_grad: zero upstream gives zero gradient") {
  Tensor4 up(1, 2, 2, 2);
  Rng rng(4);
  Tensor4 w = random_tensor(2, 3, 3, 3, rng);
  ConvGeometry g{3, 2, 3, 1, 1, 1, 1};
  const Tensor4 dx = conv2d_input_grad(w, up, g, 2, 2, 1);
  for (double v : dx.raw()) CHECK(v == 0.0);
}

TEST_CASE("conv kernels: finite differences on L = sum(y^2)/2") {
  Rng rng(21);
  ConvGeometry g{2, 3, 3, 1, 1, 1, 1};
  Tensor4 input = random_tensor(1, 2, 4, 4, rng, 0.5);
  Tensor4 w = random_tensor(3, 2, 3, 3, rng, 0.5);
  auto loss = [&](const Tensor4& x) {
    const Tensor4 y = conv2d_forward(x, w, g);
    double acc = 0.0;
    for (double v : y.raw()) acc += v * v;
    return acc / 2.0;
  };
  // dL/dy = y, so input grad of upstream=y should match FD on x.
  const Tensor4 y = conv2d_forward(input, w, g);
  const Tensor4 dx = conv2d_input_grad(w, y, g, 4, 4, 1);
  const double h = 1e-6;
  for (std::size_t i = 0; i < input.size(); ++i) {
    Tensor4 xp = input, xm = input;
    xp.raw()[i] += h;
    xm.raw()[i] -= h;
    const double fd = (loss(xp) - loss(xm)) / (2.0 * h);
    const double denom = std::max(1.0, std::abs(fd));
    CHECK(std::abs(dx.raw()[i] - fd) / denom <= 1e-6);
  }
}
