#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trady {

struct EpochRow {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::uint64_t slots_used = 0;
  std::uint64_t budget = 0;
  double weight_sparsity = 0.0;
  double activation_sparsity = 0.0;
  std::uint64_t wgrad_macs = 0;
  double macs_saved_fraction = 0.0;
  std::optional<double> alpha_hat;
  std::optional<double> alpha_raw;  // pre-clip estimate, summary only
};

// One training run's per-epoch metrics plus topology vectors for cross-run
// analysis.
struct RunRecord {
  std::string label;
  std::vector<EpochRow> rows;
  std::vector<double> layer_raw_topology;    // per conv ordinal
  std::vector<double> layer_rgn_topology;    // per conv ordinal
  std::vector<double> channel_raw_topology;  // flattened (layer, channel)
  double initial_test_acc = 0.0;
};

extern const char* kMetricsCsvHeader;

// 17 significant digits; exact round-trip for f64.
std::string format_double(double v);

void write_metrics_csv(const RunRecord& record, const std::string& path);
std::vector<EpochRow> read_metrics_csv(const std::string& path);

void write_matrix_csv(const std::vector<std::string>& labels,
                      const std::vector<std::vector<double>>& values, const std::string& path);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained single-file SVG line chart.
void render_svg_curves(const std::vector<Series>& series, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& path);

}  // namespace trady
