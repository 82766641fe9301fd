#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trady/dataset.hpp"
#include "trady/network.hpp"
#include "trady/report.hpp"
#include "trady/selection.hpp"

namespace trady {

struct ExperimentConfig {
  // network
  std::string network = "toynet-residual";
  int width = 8;
  int in_channels = 1;
  int image_hw = 16;
  int classes = 4;

  // data: "synthetic" or "idx"
  std::string data_kind = "synthetic";
  SyntheticTaskConfig synthetic;  // samples_per_class = train split size
  int synthetic_test_per_class = 40;
  std::string idx_train_images, idx_train_labels, idx_test_images, idx_test_labels;

  // strategy
  StrategyKind strategy = StrategyKind::TopKRandom;
  StrategyMode mode = StrategyMode::Dynamic;
  double threshold_eps = 0.0;
  bool threshold_on_rgn = true;
  bool dense_training = false;  // pretrain: all channels, no budget

  // layer pool: "all", "top_k" (profile_path + theta), or "layers"
  std::string pool_kind = "all";
  double theta = 0.97;
  std::vector<int> pool_layers;
  std::string profile_path;

  // budget: absolute slots, or fraction of backbone slots when >= 0
  std::uint64_t budget_slots = 0;
  double budget_fraction = -1.0;

  int epochs = 30;
  int warmup_epochs = 5;
  double lr_max = 0.125;
  int batch_size = 32;
  std::uint64_t seed = 1;

  bool collect_alpha = false;
  bool collect_topology = true;

  std::string init_checkpoint;  // empty: random init
  std::string out_dir;          // empty: no files written
  std::string label;
};

ExperimentConfig config_from_json_file(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

// Accumulated full-gradient profile of one run (layer/channel topology).
struct ProfileData {
  std::vector<double> layer_raw;
  std::vector<double> layer_rgn;
  std::vector<double> channel_raw;  // flattened (layer ordinal, channel)
  std::uint64_t profiling_macs = 0;
};

struct ExperimentResult {
  RunRecord record;
  Parameters final_params;
  NetworkSpec spec;
  std::vector<SelectionMask> masks_per_epoch;
};

// Full-gradient channel scores over the dataset (all-true mask, no update).
std::vector<ChannelScore> profile_channel_scores(const NetworkSpec& spec, const Parameters& params,
                                                 const Dataset& data, int batch_size,
                                                 std::uint64_t* macs = nullptr);

// Executes one pretrain or transfer run per the config; writes metrics CSV,
// mask audit log, topology vectors, summary and final checkpoint into
// out_dir when set.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Layer-RGN profile (Eq. 8 accumulation) over a few profiling epochs.
LayerRgnProfile profile_layers(const NetworkSpec& spec, const Parameters& params,
                               const Dataset& data, int batch_size, int epochs);

double evaluate_accuracy(const NetworkSpec& spec, const Parameters& params, const Dataset& data,
                         int batch_size);

}  // namespace trady
