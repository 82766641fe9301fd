#pragma once

#include <string>
#include <vector>

namespace trady {

// Per-layer or per-channel cumulative gradient norms of one run.
struct TopologyVector {
  enum class Kind { Layer, Channel };
  Kind kind = Kind::Layer;
  std::vector<double> values;
  std::string label;  // run metadata (dataset/seed/strategy)
};

// Continued-fraction regularized incomplete beta I_x(a,b), abs err <= 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

// Spearman rank correlation with average ranks for ties; n >= 3, neither
// vector constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct SpearmanMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho;
};
SpearmanMatrix spearman_matrix(const std::vector<TopologyVector>& runs);

enum class TTestVariant { StudentPooled, Welch };

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 0.0;
  std::string kind;  // "student" | "welch" | "paired"
};

// Two-sided two-sample t-test.
TestResult t_test_two_sample(const std::vector<double>& x, const std::vector<double>& y,
                             TTestVariant variant);

// One-sided paired t-test of H1: mean(a) > mean(b).
TestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Pairwise two-sample p-values over channel topologies.
struct PValueMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> p;
};
PValueMatrix t_test_matrix(const std::vector<TopologyVector>& runs, TTestVariant variant);

// Two-sided p for a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);
// One-sided p = P(T_df > t).
double t_one_sided_p(double t, double df);

}  // namespace trady
