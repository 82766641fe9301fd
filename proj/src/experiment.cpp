#include "trady/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "trady/checkpoint.hpp"
#include "trady/ht_stats.hpp"

namespace trady {

namespace {

Tensor4 gather_batch(const Tensor4& images, const std::vector<int>& order, std::size_t start,
                     std::size_t n) {
  const std::size_t C = images.dim(1), H = images.dim(2), W = images.dim(3);
  Tensor4 out(n, C, H, W);
  const std::size_t sample = C * H * W;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = static_cast<std::size_t>(order[start + i]);
    std::copy(images.raw().begin() + static_cast<std::ptrdiff_t>(src * sample),
              images.raw().begin() + static_cast<std::ptrdiff_t>((src + 1) * sample),
              out.raw().begin() + static_cast<std::ptrdiff_t>(i * sample));
  }
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels, const std::vector<int>& order,
                               std::size_t start, std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = labels[static_cast<std::size_t>(order[start + i])];
  return out;
}

std::vector<int> identity_order(std::size_t n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// GradientSet scaled accumulation for full-gradient profiling.
struct GradAccumulator {
  std::vector<Tensor4> conv;
  void init_like(const GradientSet& gs) {
    conv.clear();
    for (const Tensor4& t : gs.conv_grads) {
      conv.emplace_back(t.dim(0), t.dim(1), t.dim(2), t.dim(3));
    }
  }
  void add_scaled(const GradientSet& gs, double w) {
    for (std::size_t i = 0; i < conv.size(); ++i) {
      double* dst = conv[i].data();
      const double* src = gs.conv_grads[i].data();
      for (std::size_t j = 0; j < conv[i].size(); ++j) dst[j] += w * src[j];
    }
  }
};

}  // namespace

std::vector<ChannelScore> profile_channel_scores(const NetworkSpec& spec, const Parameters& params,
                                                 const Dataset& data, int batch_size,
                                                 std::uint64_t* macs) {
  const ChannelCostTable table = make_cost_table(spec);
  const SelectionMask dense = full_mask(spec);
  const Tensor4 x = standardize(data.images);
  const std::size_t n = x.dim(0);
  const std::vector<int> order = identity_order(n);

  GradAccumulator accum;
  GradientSet flags_template;
  bool initialized = false;
  std::uint64_t total_macs = 0;
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    const std::size_t bn = std::min(static_cast<std::size_t>(batch_size), n - start);
    const Tensor4 bx = gather_batch(x, order, start, bn);
    const std::vector<int> by = gather_labels(data.labels, order, start, bn);
    ForwardResult fr = forward(spec, params, bx, dense);
    const SoftmaxCrossEntropy sce = softmax_cross_entropy(fr.logits, by);
    GradientSet gs = backward(spec, params, fr.cache, sce.dlogits, dense);
    total_macs += gs.wgrad_macs;
    if (!initialized) {
      accum.init_like(gs);
      flags_template.computed = gs.computed;
      initialized = true;
    }
    accum.add_scaled(gs, static_cast<double>(bn) / static_cast<double>(n));
  }
  if (macs != nullptr) *macs = total_macs;

  GradientSet mean;
  mean.conv_grads = std::move(accum.conv);
  mean.computed = flags_template.computed;
  return score_all_channels(spec, mean, table);
}

double evaluate_accuracy(const NetworkSpec& spec, const Parameters& params, const Dataset& data,
                         int batch_size) {
  const SelectionMask none = empty_mask(spec);
  const Tensor4 x = standardize(data.images);
  const std::size_t n = x.dim(0);
  const std::vector<int> order = identity_order(n);
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    const std::size_t bn = std::min(static_cast<std::size_t>(batch_size), n - start);
    const Tensor4 bx = gather_batch(x, order, start, bn);
    const std::vector<int> by = gather_labels(data.labels, order, start, bn);
    ForwardResult fr = forward(spec, params, bx, none);
    for (std::size_t b = 0; b < bn; ++b) {
      std::size_t arg = 0;
      double best = fr.logits.at(b, 0);
      for (std::size_t k = 1; k < fr.logits.cols; ++k) {
        if (fr.logits.at(b, k) > best) {
          best = fr.logits.at(b, k);
          arg = k;
        }
      }
      if (static_cast<int>(arg) == by[b]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

LayerRgnProfile profile_layers(const NetworkSpec& spec, const Parameters& params0,
                               const Dataset& data, int batch_size, int epochs) {
  Parameters params = params0;
  const ChannelCostTable table = make_cost_table(spec);
  const SelectionMask dense = full_mask(spec);
  const int warmup = std::min(5, epochs - 1);
  Rng shuffle_rng(Rng::derive(0x70f11e, 0));

  LayerRgnProfile profile;
  profile.rgn.assign(table.layers.size(), 0.0);
  profile.raw.assign(table.layers.size(), 0.0);

  const Tensor4 x = standardize(data.images);
  const std::size_t n = x.dim(0);
  for (int e = 0; e < epochs; ++e) {
    const std::vector<ChannelScore> scores = profile_channel_scores(spec, params, data, batch_size);
    for (const ChannelScore& s : scores) {
      profile.rgn[static_cast<std::size_t>(s.layer_ordinal)] += s.rgn;
      profile.raw[static_cast<std::size_t>(s.layer_ordinal)] += s.raw_norm;
    }
    const double lr = cosine_warmup_lr(e, epochs, warmup, 0.125);
    std::vector<int> order = identity_order(n);
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
      const std::size_t bn = std::min(static_cast<std::size_t>(batch_size), n - start);
      const Tensor4 bx = gather_batch(x, order, start, bn);
      const std::vector<int> by = gather_labels(data.labels, order, start, bn);
      ForwardResult fr = forward(spec, params, bx, dense);
      const SoftmaxCrossEntropy sce = softmax_cross_entropy(fr.logits, by);
      GradientSet gs = backward(spec, params, fr.cache, sce.dlogits, dense);
      sgd_step(params, gs, lr);
    }
  }
  return profile;
}

namespace {

LayerPool resolve_pool(const ExperimentConfig& cfg, const ChannelCostTable& table) {
  LayerPool pool;
  if (cfg.pool_kind == "all") {
    for (std::size_t i = 0; i < table.layers.size(); ++i) pool.layers.push_back(static_cast<int>(i));
  } else if (cfg.pool_kind == "layers") {
    pool.layers = cfg.pool_layers;
    if (pool.layers.empty()) throw std::invalid_argument("pool.layers must be nonempty");
  } else if (cfg.pool_kind == "top_k") {
    if (cfg.profile_path.empty()) {
      throw std::invalid_argument("pool.kind top_k requires a profile path");
    }
    std::ifstream in(cfg.profile_path);
    if (!in) throw std::runtime_error("cannot open profile " + cfg.profile_path);
    nlohmann::json j;
    in >> j;
    const std::vector<double> rgn = j.at("layer_rgn").get<std::vector<double>>();
    if (rgn.size() != table.layers.size()) {
      throw std::runtime_error("profile layer count does not match network");
    }
    pool = top_k_layers(rgn, cfg.theta);
  } else {
    throw std::invalid_argument("unknown pool kind: " + cfg.pool_kind);
  }
  return pool;
}

Dataset load_dataset_split(const ExperimentConfig& cfg, bool train) {
  if (cfg.data_kind == "synthetic") {
    SyntheticTaskConfig sc = cfg.synthetic;
    sc.channels = cfg.in_channels;
    sc.height = cfg.image_hw;
    sc.width = cfg.image_hw;
    sc.classes = cfg.classes;
    if (!train) sc.samples_per_class = cfg.synthetic_test_per_class;
    return gen_synthetic_task(sc, train ? 0 : 1);
  }
  if (cfg.data_kind == "idx") {
    Dataset ds;
    ds.images = load_idx_images(train ? cfg.idx_train_images : cfg.idx_test_images);
    ds.labels = load_idx_labels(train ? cfg.idx_train_labels : cfg.idx_test_labels);
    if (ds.images.dim(0) != ds.labels.size()) {
      throw std::runtime_error("idx dataset: image/label count mismatch");
    }
    ds.classes = cfg.classes;
    return ds;
  }
  throw std::invalid_argument("unknown data kind: " + cfg.data_kind);
}

// Fixed flattening order for the alpha trace: conv ordinals ascending, each
// selected channel's (c',k,l) slice, then classifier weight and bias.
std::size_t trace_param_count(const NetworkSpec& spec, const SelectionMask& mask,
                              const Parameters& params) {
  const std::vector<int> convs = spec.conv_layer_indices();
  std::size_t p = 0;
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(convs[ci])].geom;
    std::size_t sel = 0;
    for (std::uint8_t m : mask.layers[ci]) sel += m ? 1 : 0;
    p += sel * static_cast<std::size_t>(g.out_per_group()) *
         static_cast<std::size_t>(g.kernel) * static_cast<std::size_t>(g.kernel);
  }
  p += params.fc_w.data.size() + params.fc_b.size();
  return p;
}

void append_trace_column(const NetworkSpec& spec, const SelectionMask& mask,
                         const GradientSet& gs, std::size_t step, std::size_t steps,
                         std::vector<double>& values) {
  const std::vector<int> convs = spec.conv_layer_indices();
  std::size_t p = 0;
  auto put = [&](double v) {
    values[p * steps + step] = v;
    ++p;
  };
  for (std::size_t ci = 0; ci < convs.size(); ++ci) {
    const ConvGeometry& g = spec.layers[static_cast<std::size_t>(convs[ci])].geom;
    const int cpg = g.in_per_group();
    const int opg = g.out_per_group();
    for (int c = 0; c < g.in_channels; ++c) {
      if (!mask.layers[ci][static_cast<std::size_t>(c)]) continue;
      const int gi = g.group_of_input_channel(c);
      const std::size_t cl = static_cast<std::size_t>(c % cpg);
      for (int oo = 0; oo < opg; ++oo) {
        const std::size_t co = static_cast<std::size_t>(gi * opg + oo);
        for (int k = 0; k < g.kernel; ++k) {
          for (int l = 0; l < g.kernel; ++l) {
            put(gs.conv_grads[ci].at(co, cl, static_cast<std::size_t>(k),
                                     static_cast<std::size_t>(l)));
          }
        }
      }
    }
  }
  for (double v : gs.fc_dw.data) put(v);
  for (double v : gs.fc_db) put(v);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  NetworkSpec spec = make_network(cfg.network, cfg.in_channels, cfg.image_hw, cfg.classes,
                                  cfg.width);
  const ChannelCostTable table = make_cost_table(spec);
  const std::vector<int> convs = spec.conv_layer_indices();

  const Dataset train = load_dataset_split(cfg, true);
  const Dataset test = load_dataset_split(cfg, false);
  if (train.classes != spec.classes()) {
    throw std::invalid_argument("run_experiment: dataset classes != network classes");
  }

  Parameters params;
  if (cfg.init_checkpoint.empty()) {
    Rng init_rng(Rng::derive(cfg.seed, 0));
    params = init_params(spec, init_rng);
  } else {
    params = load_params(spec, cfg.init_checkpoint);
  }

  Budget budget;
  if (cfg.dense_training) {
    budget.limit = table.total_slots();
  } else if (cfg.budget_fraction >= 0.0) {
    budget.limit = static_cast<std::uint64_t>(cfg.budget_fraction *
                                              static_cast<double>(table.total_slots()));
  } else {
    budget.limit = cfg.budget_slots;
  }

  StrategyState state;
  state.kind = cfg.strategy;
  state.mode = cfg.mode;
  state.pool = resolve_pool(cfg, table);
  state.budget = budget;
  state.eps = cfg.threshold_eps;
  state.threshold_on_rgn = cfg.threshold_on_rgn;
  state.rng = Rng(Rng::derive(cfg.seed, 1));
  Rng shuffle_rng(Rng::derive(cfg.seed, 2));

  const bool budgeted = !cfg.dense_training && cfg.strategy != StrategyKind::Threshold;
  const bool score_based = cfg.strategy == StrategyKind::DetRGN ||
                           cfg.strategy == StrategyKind::DetRawNorm ||
                           cfg.strategy == StrategyKind::Threshold;

  const Tensor4 train_x = standardize(train.images);
  const std::size_t n_train = train_x.dim(0);
  const std::size_t batch_size = static_cast<std::size_t>(cfg.batch_size);

  ExperimentResult result;
  result.record.label = cfg.label;
  result.record.initial_test_acc = evaluate_accuracy(spec, params, test, cfg.batch_size);

  ProfileData topo;
  topo.layer_raw.assign(table.layers.size(), 0.0);
  topo.layer_rgn.assign(table.layers.size(), 0.0);
  std::size_t total_channels = 0;
  for (const auto& l : table.layers) total_channels += static_cast<std::size_t>(l.channels);
  topo.channel_raw.assign(total_channels, 0.0);

  std::vector<std::uint64_t> profiling_macs_per_epoch;
  std::vector<double> alpha_raw_per_epoch;

  for (int e = 0; e < cfg.epochs; ++e) {
    // Full-gradient profiling pass: feeds score-based strategies and the
    // cumulative topology vectors. Its MACs are tracked separately and never
    // count toward the budgeted backward cost.
    const bool needs_scores = score_based && (cfg.mode == StrategyMode::Dynamic || e == 0);
    std::vector<ChannelScore> scores;
    std::uint64_t prof_macs = 0;
    if (needs_scores || cfg.collect_topology) {
      scores = profile_channel_scores(spec, params, train, cfg.batch_size, &prof_macs);
      if (cfg.collect_topology) {
        std::size_t flat = 0;
        for (std::size_t ci = 0; ci < table.layers.size(); ++ci) {
          for (int c = 0; c < table.layers[ci].channels; ++c) {
            const ChannelScore& s = scores[flat];
            topo.layer_raw[ci] += s.raw_norm;
            topo.layer_rgn[ci] += s.rgn;
            topo.channel_raw[flat] += s.raw_norm;
            ++flat;
          }
        }
      }
    }
    profiling_macs_per_epoch.push_back(prof_macs);
    topo.profiling_macs += prof_macs;

    SelectionMask mask;
    if (cfg.dense_training) {
      mask = full_mask(spec);
    } else {
      mask = strategy_step(state, table, e, needs_scores ? &scores : nullptr);
    }
    if (budgeted && mask.slots > budget.limit) {
      std::ostringstream oss;
      oss << "budget violation at epoch " << e << ": " << mask.slots << " slots > limit "
          << budget.limit;
      throw std::runtime_error(oss.str());
    }
    result.masks_per_epoch.push_back(mask);

    const double lr = cosine_warmup_lr(e, cfg.epochs, cfg.warmup_epochs, cfg.lr_max);
    std::vector<int> order = identity_order(n_train);
    shuffle_rng.shuffle(order);

    const std::size_t steps = (n_train + batch_size - 1) / batch_size;
    std::vector<double> trace_values;
    std::size_t trace_params = 0;
    if (cfg.collect_alpha) {
      trace_params = trace_param_count(spec, mask, params);
      trace_values.assign(trace_params * steps, 0.0);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::uint64_t epoch_macs = 0;
    const SelectionCost mask_cost = selection_cost(mask.layers, table);
    std::size_t step = 0;
    for (std::size_t start = 0; start < n_train; start += batch_size, ++step) {
      const std::size_t bn = std::min(batch_size, n_train - start);
      const Tensor4 bx = gather_batch(train_x, order, start, bn);
      const std::vector<int> by = gather_labels(train.labels, order, start, bn);
      ForwardResult fr = forward(spec, params, bx, mask);
      if (fr.cache.stored_activation_slots != mask_cost.activation_slots) {
        throw std::runtime_error("run_experiment: cached activation slots != mask accounting");
      }
      const SoftmaxCrossEntropy sce = softmax_cross_entropy(fr.logits, by);
      loss_sum += sce.loss * static_cast<double>(bn);
      for (std::size_t b = 0; b < bn; ++b) {
        if (sce.argmax[b] == by[b]) ++correct;
      }
      GradientSet gs = backward(spec, params, fr.cache, sce.dlogits, mask);
      if (gs.wgrad_macs != mask.macs_per_sample * bn) {
        std::ostringstream oss;
        oss << "MAC counter mismatch at epoch " << e << " step " << step << ": instrumented "
            << gs.wgrad_macs << " != analytic " << mask.macs_per_sample * bn;
        throw std::runtime_error(oss.str());
      }
      epoch_macs += gs.wgrad_macs;
      if (cfg.collect_alpha) append_trace_column(spec, mask, gs, step, steps, trace_values);
      sgd_step(params, gs, lr);
    }

    const SparsityReport sparsity = sparsity_report(mask.layers, table, epoch_macs, n_train);

    EpochRow row;
    row.epoch = e;
    row.lr = lr;
    row.train_loss = loss_sum / static_cast<double>(n_train);
    row.train_acc = static_cast<double>(correct) / static_cast<double>(n_train);
    row.test_acc = evaluate_accuracy(spec, params, test, cfg.batch_size);
    row.slots_used = mask.slots;
    row.budget = budgeted ? budget.limit : table.total_slots();
    row.weight_sparsity = sparsity.weight_sparsity;
    row.activation_sparsity = sparsity.activation_sparsity;
    row.wgrad_macs = epoch_macs;
    row.macs_saved_fraction = sparsity.macs_saved_fraction;
    if (cfg.collect_alpha) {
      GradientTraceMatrix trace{trace_params, steps, std::move(trace_values)};
      AlphaEstimate est = estimate_alpha(trace.values);
      est.epoch = e;
      row.alpha_hat = est.alpha_hat;
      row.alpha_raw = est.raw_alpha;
      alpha_raw_per_epoch.push_back(est.raw_alpha);
    }
    result.record.rows.push_back(row);
  }

  result.record.layer_raw_topology = topo.layer_raw;
  result.record.layer_rgn_topology = topo.layer_rgn;
  result.record.channel_raw_topology = topo.channel_raw;
  result.final_params = params;
  result.spec = spec;

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    write_metrics_csv(result.record, cfg.out_dir + "/metrics.csv");

    nlohmann::json audit;
    audit["layer_index_by_ordinal"] = convs;
    audit["epochs"] = nlohmann::json::array();
    for (std::size_t e = 0; e < result.masks_per_epoch.size(); ++e) {
      const SelectionMask& m = result.masks_per_epoch[e];
      nlohmann::json entry;
      entry["epoch"] = e;
      entry["slots"] = m.slots;
      entry["macs_per_sample"] = m.macs_per_sample;
      entry["profiling_macs"] = profiling_macs_per_epoch[e];
      nlohmann::json channels = nlohmann::json::object();
      for (std::size_t ci = 0; ci < m.layers.size(); ++ci) {
        std::vector<int> sel;
        for (int c = 0; c < static_cast<int>(m.layers[ci].size()); ++c) {
          if (m.layers[ci][static_cast<std::size_t>(c)]) sel.push_back(c);
        }
        channels[std::to_string(convs[ci])] = sel;
      }
      entry["mask"] = channels;
      audit["epochs"].push_back(entry);
    }
    std::ofstream(cfg.out_dir + "/masks.json") << audit.dump(2) << "\n";

    nlohmann::json topo_json;
    topo_json["layer_index_by_ordinal"] = convs;
    topo_json["layer_raw"] = topo.layer_raw;
    topo_json["layer_rgn"] = topo.layer_rgn;
    topo_json["channel_raw"] = topo.channel_raw;
    std::ofstream(cfg.out_dir + "/topology.json") << topo_json.dump(2) << "\n";

    nlohmann::json summary;
    summary["label"] = cfg.label;
    summary["network"] = cfg.network;
    summary["strategy"] = to_string(cfg.strategy);
    summary["mode"] = to_string(cfg.mode);
    summary["dense_training"] = cfg.dense_training;
    summary["budget_slots"] = budget.limit;
    summary["total_backbone_slots"] = table.total_slots();
    summary["epochs"] = cfg.epochs;
    summary["seed"] = cfg.seed;
    summary["initial_test_acc"] = result.record.initial_test_acc;
    summary["final_test_acc"] = result.record.rows.empty() ? result.record.initial_test_acc
                                                           : result.record.rows.back().test_acc;
    summary["profiling_macs_total"] = topo.profiling_macs;
    summary["alpha_raw_per_epoch"] = alpha_raw_per_epoch;
    std::ofstream(cfg.out_dir + "/summary.json") << summary.dump(2) << "\n";

    save_params(spec, params, cfg.out_dir + "/checkpoint");
  }
  return result;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.label = j.value("label", std::string{});
  if (j.contains("network")) {
    const auto& n = j["network"];
    cfg.network = n.value("name", cfg.network);
    cfg.width = n.value("width", cfg.width);
    cfg.in_channels = n.value("in_channels", cfg.in_channels);
    cfg.image_hw = n.value("image_hw", cfg.image_hw);
    cfg.classes = n.value("classes", cfg.classes);
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    cfg.data_kind = d.value("kind", cfg.data_kind);
    cfg.synthetic.task_seed = d.value("task_seed", cfg.synthetic.task_seed);
    cfg.synthetic.samples_per_class = d.value("train_per_class", cfg.synthetic.samples_per_class);
    cfg.synthetic_test_per_class = d.value("test_per_class", cfg.synthetic_test_per_class);
    cfg.synthetic.noise_sigma = d.value("noise_sigma", cfg.synthetic.noise_sigma);
    cfg.idx_train_images = d.value("train_images", std::string{});
    cfg.idx_train_labels = d.value("train_labels", std::string{});
    cfg.idx_test_images = d.value("test_images", std::string{});
    cfg.idx_test_labels = d.value("test_labels", std::string{});
  }
  if (j.contains("strategy")) {
    const auto& s = j["strategy"];
    if (s.contains("kind")) cfg.strategy = strategy_kind_from_string(s["kind"].get<std::string>());
    if (s.contains("mode")) cfg.mode = strategy_mode_from_string(s["mode"].get<std::string>());
    cfg.threshold_eps = s.value("eps", cfg.threshold_eps);
    if (s.contains("metric")) cfg.threshold_on_rgn = s["metric"].get<std::string>() == "rgn";
    cfg.dense_training = s.value("dense", cfg.dense_training);
  }
  if (j.contains("pool")) {
    const auto& p = j["pool"];
    cfg.pool_kind = p.value("kind", cfg.pool_kind);
    cfg.theta = p.value("theta", cfg.theta);
    if (p.contains("layers")) cfg.pool_layers = p["layers"].get<std::vector<int>>();
    cfg.profile_path = p.value("profile", std::string{});
  }
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    if (b.contains("slots")) cfg.budget_slots = b["slots"].get<std::uint64_t>();
    if (b.contains("fraction")) cfg.budget_fraction = b["fraction"].get<double>();
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    cfg.epochs = t.value("epochs", cfg.epochs);
    cfg.warmup_epochs = t.value("warmup_epochs", cfg.warmup_epochs);
    cfg.lr_max = t.value("lr_max", cfg.lr_max);
    cfg.batch_size = t.value("batch_size", cfg.batch_size);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("collect")) {
    cfg.collect_alpha = j["collect"].value("alpha", cfg.collect_alpha);
    cfg.collect_topology = j["collect"].value("topology", cfg.collect_topology);
  }
  cfg.init_checkpoint = j.value("init_checkpoint", std::string{});
  cfg.out_dir = j.value("out_dir", std::string{});
  return cfg;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

}  // namespace trady
