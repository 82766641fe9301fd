#include "trady/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace trady {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double mult = d * c;
    h *= mult;
    if (std::abs(mult - 1.0) < eps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("spearman: constant vector has undefined correlation");
  }
  return sxy / std::sqrt(sxx * syy);
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: a and b must be > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: x must be in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_cf(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t_two_sided_p: df must be > 0");
  if (!std::isfinite(t)) throw std::invalid_argument("t_two_sided_p: non-finite statistic");
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double t_one_sided_p(double t, double df) {
  const double half = 0.5 * t_two_sided_p(std::abs(t), df);
  return t >= 0.0 ? half : 1.0 - half;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    std::ostringstream oss;
    oss << "spearman: length mismatch " << x.size() << " vs " << y.size();
    throw std::invalid_argument(oss.str());
  }
  if (x.size() < 3) throw std::invalid_argument("spearman: need n >= 3");
  return pearson(average_ranks(x), average_ranks(y));
}

SpearmanMatrix spearman_matrix(const std::vector<TopologyVector>& runs) {
  if (runs.empty()) throw std::invalid_argument("spearman_matrix: no runs");
  for (const auto& r : runs) {
    if (r.kind != runs.front().kind) {
      throw std::invalid_argument("spearman_matrix: mixed topology kinds");
    }
    if (r.values.size() != runs.front().values.size()) {
      throw std::invalid_argument("spearman_matrix: topology length mismatch");
    }
  }
  const std::size_t n = runs.size();
  SpearmanMatrix m;
  m.rho.assign(n, std::vector<double>(n, 1.0));
  for (const auto& r : runs) m.labels.push_back(r.label);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rho = spearman(runs[i].values, runs[j].values);
      m.rho[i][j] = rho;
      m.rho[j][i] = rho;
    }
  }
  return m;
}

TestResult t_test_two_sample(const std::vector<double>& x, const std::vector<double>& y,
                             TTestVariant variant) {
  if (x.size() < 2 || y.size() < 2) {
    throw std::invalid_argument("t_test_two_sample: each sample needs n >= 2");
  }
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  const double vx = sample_var(x, mx);
  const double vy = sample_var(y, my);
  if (vx <= 0.0 && vy <= 0.0) {
    throw std::invalid_argument("t_test_two_sample: both samples have zero variance");
  }
  TestResult r;
  if (variant == TTestVariant::StudentPooled) {
    const double pooled = ((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0);
    r.statistic = (mx - my) / std::sqrt(pooled * (1.0 / nx + 1.0 / ny));
    r.df = nx + ny - 2.0;
    r.kind = "student";
  } else {
    const double sx = vx / nx;
    const double sy = vy / ny;
    r.statistic = (mx - my) / std::sqrt(sx + sy);
    r.df = (sx + sy) * (sx + sy) /
           (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    r.kind = "welch";
  }
  r.p_value = t_two_sided_p(r.statistic, r.df);
  return r;
}

TestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: need n >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double md = sample_mean(d);
  const double vd = sample_var(d, md);
  if (vd <= 0.0) {
    throw std::invalid_argument("paired_t_test: zero-variance differences (degenerate)");
  }
  TestResult r;
  r.statistic = md / std::sqrt(vd / static_cast<double>(d.size()));
  r.df = static_cast<double>(d.size() - 1);
  r.p_value = t_one_sided_p(r.statistic, r.df);
  r.kind = "paired";
  return r;
}

PValueMatrix t_test_matrix(const std::vector<TopologyVector>& runs, TTestVariant variant) {
  if (runs.empty()) throw std::invalid_argument("t_test_matrix: no runs");
  for (const auto& r : runs) {
    if (r.kind != runs.front().kind) throw std::invalid_argument("t_test_matrix: mixed kinds");
  }
  const std::size_t n = runs.size();
  PValueMatrix m;
  m.p.assign(n, std::vector<double>(n, 1.0));
  for (const auto& r : runs) m.labels.push_back(r.label);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = t_test_two_sample(runs[i].values, runs[j].values, variant).p_value;
      m.p[i][j] = p;
      m.p[j][i] = p;
    }
  }
  return m;
}

}  // namespace trady
