#include "trady/ht_stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trady {

AlphaEstimate estimate_alpha(const std::vector<double>& samples) {
  std::vector<double> kept;
  kept.reserve(samples.size());
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("estimate_alpha: non-finite sample");
    if (v != 0.0) kept.push_back(v);
  }
  if (!samples.empty() && kept.size() * 2 < samples.size()) {
    std::ostringstream oss;
    oss << "estimate_alpha: " << (samples.size() - kept.size()) << " of " << samples.size()
        << " samples are exactly zero (>50%)";
    throw std::invalid_argument(oss.str());
  }
  if (kept.size() < 100) {
    std::ostringstream oss;
    oss << "estimate_alpha: need >= 100 nonzero samples, got " << kept.size();
    throw std::invalid_argument(oss.str());
  }

  const std::size_t n = kept.size();
  const std::size_t k1 = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t k2 = n / k1;
  const std::size_t used = k1 * k2;

  double mean_log_abs = 0.0;
  for (std::size_t i = 0; i < used; ++i) mean_log_abs += std::log(std::abs(kept[i]));
  mean_log_abs /= static_cast<double>(used);

  double mean_log_block = 0.0;
  for (std::size_t j = 0; j < k2; ++j) {
    double block = 0.0;
    for (std::size_t i = 0; i < k1; ++i) block += kept[j * k1 + i];
    if (block == 0.0) {
      throw std::invalid_argument("estimate_alpha: degenerate zero block sum");
    }
    mean_log_block += std::log(std::abs(block));
  }
  mean_log_block /= static_cast<double>(k2);

  const double inv_alpha = (mean_log_block - mean_log_abs) / std::log(static_cast<double>(k1));

  AlphaEstimate est;
  est.sample_count = n;
  est.raw_alpha = inv_alpha > 0.0 ? 1.0 / inv_alpha : std::numeric_limits<double>::infinity();
  est.alpha_hat = est.raw_alpha > 2.0 ? 2.0 : est.raw_alpha;
  return est;
}

std::vector<double> generate_sas(double alpha, double sigma, std::size_t n, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("generate_sas: alpha must be in (0,2]");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("generate_sas: sigma must be > 0");

  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (rng.next_open01() - 0.5) * M_PI;  // Uniform(-pi/2, pi/2)
    const double w = -std::log(rng.next_open01());      // Exp(1)
    if (alpha == 2.0) {
      out.push_back(sigma * 2.0 * std::sin(u) * std::sqrt(w));
      continue;
    }
    const double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
                     std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
    out.push_back(sigma * x);
  }
  return out;
}

void GradientTraceMatrix::validate() const {
  if (values.size() != params * steps) {
    throw std::invalid_argument("GradientTraceMatrix: value count != P*S");
  }
  if (params * steps < 100) {
    throw std::invalid_argument("GradientTraceMatrix: P*S must be >= 100 for estimation");
  }
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("GradientTraceMatrix: NaN entry");
  }
}

std::vector<AlphaEstimate> alpha_trajectory(const std::vector<GradientTraceMatrix>& epochs) {
  std::vector<AlphaEstimate> out;
  out.reserve(epochs.size());
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    epochs[e].validate();
    try {
      AlphaEstimate est = estimate_alpha(epochs[e].values);
      est.epoch = static_cast<int>(e);
      out.push_back(est);
    } catch (const std::exception& ex) {
      std::ostringstream oss;
      oss << "alpha_trajectory: epoch " << e << ": " << ex.what();
      throw std::runtime_error(oss.str());
    }
  }
  return out;
}

}  // namespace trady
