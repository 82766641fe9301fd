#pragma once

#include <cstddef>
#include <vector>

#include "trady/rng.hpp"

namespace trady {

struct AlphaEstimate {
  double alpha_hat = 0.0;  // clipped into (0, 2]
  double raw_alpha = 0.0;  // pre-clip value (may exceed 2)
  std::size_t sample_count = 0;
  int epoch = -1;
};

// Block-sum log-moment tail-index estimator with K1 = floor(sqrt(N)).
// Exact zeros are dropped first; errors if fewer than 100 samples remain or
// more than half of the input is exactly zero.
AlphaEstimate estimate_alpha(const std::vector<double>& samples);

// Chambers-Mallows-Stuck draws from the symmetric alpha-stable law
// SaS(sigma); alpha = 2 is handled analytically (Normal(0, 2 sigma^2)).
std::vector<double> generate_sas(double alpha, double sigma, std::size_t n, Rng& rng);

// P x S matrix of stochastic gradients collected within one epoch:
// P trainable-parameter rows, S training-step columns, row-major.
struct GradientTraceMatrix {
  std::size_t params = 0;
  std::size_t steps = 0;
  std::vector<double> values;

  void validate() const;
};

// One estimate per epoch, flattening each matrix row-major.
std::vector<AlphaEstimate> alpha_trajectory(const std::vector<GradientTraceMatrix>& epochs);

}  // namespace trady
