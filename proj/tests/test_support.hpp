#pragma once

#include <vector>

#include "trady/rng.hpp"
#include "trady/tensor.hpp"

namespace testutil {

inline trady::Tensor4 random_tensor(std::size_t n0, std::size_t n1, std::size_t n2,
                                    std::size_t n3, trady::Rng& rng, double scale = 1.0) {
  trady::Tensor4 t(n0, n1, n2, n3);
  for (double& v : t.raw()) v = scale * rng.next_normal();
  return t;
}

inline std::vector<int> random_labels(std::size_t n, int classes, trady::Rng& rng) {
  std::vector<int> out(n);
  for (auto& v : out) v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(classes)));
  return out;
}

inline double max_abs_diff(const trady::Tensor4& a, const trady::Tensor4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.raw()[i] > b.raw()[i] ? a.raw()[i] - b.raw()[i] : b.raw()[i] - a.raw()[i];
    if (d > m) m = d;
  }
  return m;
}

}  // namespace testutil
