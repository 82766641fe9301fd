// Command-line front end: dataset generation, pretraining, budgeted
// fine-tuning, layer profiling, cross-run analysis and SVG reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trady/analysis.hpp"
#include "trady/checkpoint.hpp"
#include "trady/experiment.hpp"
#include "trady/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::uint64_t> budget;
  std::string strategy;
  std::string mode;
};

trady::ExperimentConfig load_config(const CommonOpts& opts) {
  trady::ExperimentConfig cfg = opts.config.empty()
                                    ? trady::ExperimentConfig{}
                                    : trady::config_from_json_file(opts.config);
  if (opts.seed.has_value()) cfg.seed = *opts.seed;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.budget.has_value()) {
    cfg.budget_slots = *opts.budget;
    cfg.budget_fraction = -1.0;
  }
  if (!opts.strategy.empty()) cfg.strategy = trady::strategy_kind_from_string(opts.strategy);
  if (!opts.mode.empty()) cfg.mode = trady::strategy_mode_from_string(opts.mode);
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "JSON experiment config");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "run seed (overrides config)");
  cmd->add_option("--out", opts.out, "output directory (overrides config)");
  cmd->add_option("--budget", opts.budget, "memory budget in slots (overrides config)");
  cmd->add_option("--strategy", opts.strategy,
                  "full_random|topk_random|det_rgn|det_raw_norm|threshold");
  cmd->add_option("--mode", opts.mode, "static|dynamic");
}

int cmd_gen_data(const CommonOpts& opts) {
  trady::ExperimentConfig cfg = load_config(opts);
  if (cfg.out_dir.empty()) throw std::runtime_error("gen-data: --out or config out_dir required");
  fs::create_directories(cfg.out_dir);
  trady::SyntheticTaskConfig sc = cfg.synthetic;
  sc.channels = cfg.in_channels;
  sc.height = cfg.image_hw;
  sc.width = cfg.image_hw;
  sc.classes = cfg.classes;
  const trady::Dataset train = trady::gen_synthetic_task(sc, 0);
  trady::SyntheticTaskConfig tc = sc;
  tc.samples_per_class = cfg.synthetic_test_per_class;
  const trady::Dataset test = trady::gen_synthetic_task(tc, 1);
  trady::save_idx_images(train.images, cfg.out_dir + "/train-images.idx");
  trady::save_idx_labels(train.labels, cfg.out_dir + "/train-labels.idx");
  trady::save_idx_images(test.images, cfg.out_dir + "/test-images.idx");
  trady::save_idx_labels(test.labels, cfg.out_dir + "/test-labels.idx");
  std::cout << "wrote " << train.labels.size() << " train / " << test.labels.size()
            << " test samples to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_run(const CommonOpts& opts, bool pretrain) {
  trady::ExperimentConfig cfg = load_config(opts);
  if (pretrain) {
    cfg.dense_training = true;
  } else if (cfg.init_checkpoint.empty()) {
    std::cerr << "warning: finetune without init_checkpoint trains from random init\n";
  }
  const trady::ExperimentResult res = trady::run_experiment(cfg);
  const auto& rows = res.record.rows;
  std::cout << (pretrain ? "pretrain" : "finetune") << " done: " << rows.size() << " epochs, "
            << "final test acc "
            << (rows.empty() ? res.record.initial_test_acc : rows.back().test_acc) << "\n";
  if (!cfg.out_dir.empty()) std::cout << "outputs in " << cfg.out_dir << "\n";
  return 0;
}

int cmd_profile_layers(const CommonOpts& opts, int profile_epochs) {
  trady::ExperimentConfig cfg = load_config(opts);
  if (cfg.out_dir.empty()) throw std::runtime_error("profile-layers: --out required");
  fs::create_directories(cfg.out_dir);
  trady::NetworkSpec spec = trady::make_network(cfg.network, cfg.in_channels, cfg.image_hw,
                                                cfg.classes, cfg.width);
  trady::Parameters params;
  if (cfg.init_checkpoint.empty()) {
    trady::Rng rng(trady::Rng::derive(cfg.seed, 0));
    params = trady::init_params(spec, rng);
  } else {
    params = trady::load_params(spec, cfg.init_checkpoint);
  }
  trady::ExperimentConfig data_cfg = cfg;
  data_cfg.out_dir.clear();
  trady::SyntheticTaskConfig sc = cfg.synthetic;
  sc.channels = cfg.in_channels;
  sc.height = cfg.image_hw;
  sc.width = cfg.image_hw;
  sc.classes = cfg.classes;
  trady::Dataset data;
  if (cfg.data_kind == "synthetic") {
    data = trady::gen_synthetic_task(sc, 0);
  } else {
    data.images = trady::load_idx_images(cfg.idx_train_images);
    data.labels = trady::load_idx_labels(cfg.idx_train_labels);
    data.classes = cfg.classes;
  }
  const trady::LayerRgnProfile profile =
      trady::profile_layers(spec, params, data, cfg.batch_size, profile_epochs);

  json out;
  out["layer_index_by_ordinal"] = spec.conv_layer_indices();
  out["layer_rgn"] = profile.rgn;
  out["layer_raw"] = profile.raw;
  std::ofstream(cfg.out_dir + "/profile.json") << out.dump(2) << "\n";

  const auto curve = trady::cumulative_rgn_curve(profile.rgn);
  {
    std::ofstream csv(cfg.out_dir + "/cumulative_rgn.csv");
    csv << "k,layer_ordinal,cumulative_fraction\n";
    for (std::size_t k = 0; k < curve.size(); ++k) {
      csv << (k + 1) << "," << curve[k].first << "," << trady::format_double(curve[k].second)
          << "\n";
    }
  }
  const trady::LayerPool pool = trady::top_k_layers(profile.rgn, cfg.theta);
  json pj;
  pj["theta"] = cfg.theta;
  pj["pool"] = pool.layers;
  std::ofstream(cfg.out_dir + "/pool.json") << pj.dump(2) << "\n";
  std::cout << "profiled " << profile.rgn.size() << " conv layers; top-" << pool.layers.size()
            << " capture >= " << cfg.theta << " of total RGN\n";
  return 0;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

int cmd_analyze(const std::string& out_dir, const std::vector<std::string>& run_dirs) {
  if (run_dirs.size() < 2) throw std::runtime_error("analyze: need at least two run dirs");
  fs::create_directories(out_dir);
  std::vector<trady::TopologyVector> layer_runs, channel_runs;
  for (const std::string& dir : run_dirs) {
    const json topo = read_json_file(dir + "/topology.json");
    const json summary = read_json_file(dir + "/summary.json");
    const std::string label = summary.value("label", dir);
    trady::TopologyVector lv;
    lv.kind = trady::TopologyVector::Kind::Layer;
    lv.values = topo.at("layer_raw").get<std::vector<double>>();
    lv.label = label;
    layer_runs.push_back(std::move(lv));
    trady::TopologyVector cv;
    cv.kind = trady::TopologyVector::Kind::Channel;
    cv.values = topo.at("channel_raw").get<std::vector<double>>();
    cv.label = label;
    channel_runs.push_back(std::move(cv));
  }
  const trady::SpearmanMatrix sm = trady::spearman_matrix(layer_runs);
  trady::write_matrix_csv(sm.labels, sm.rho, out_dir + "/layer_spearman.csv");
  const trady::PValueMatrix pm =
      trady::t_test_matrix(channel_runs, trady::TTestVariant::StudentPooled);
  trady::write_matrix_csv(pm.labels, pm.p, out_dir + "/channel_ttest.csv");
  std::cout << "wrote " << out_dir << "/layer_spearman.csv and channel_ttest.csv for "
            << run_dirs.size() << " runs\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& a_dirs, const std::vector<std::string>& b_dirs) {
  if (a_dirs.size() != b_dirs.size() || a_dirs.empty()) {
    throw std::runtime_error("compare: --a and --b need equal nonzero counts (paired cells)");
  }
  auto final_acc = [](const std::string& dir) {
    const auto rows = trady::read_metrics_csv(dir + "/metrics.csv");
    if (rows.empty()) throw std::runtime_error("compare: empty metrics in " + dir);
    return rows.back().test_acc;
  };
  std::vector<double> a, b;
  for (const auto& d : a_dirs) a.push_back(final_acc(d));
  for (const auto& d : b_dirs) b.push_back(final_acc(d));
  const trady::TestResult r = trady::paired_t_test(a, b);
  double ma = 0, mb = 0;
  for (double v : a) ma += v;
  for (double v : b) mb += v;
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  std::cout << "mean(A)=" << ma << " mean(B)=" << mb << " t=" << r.statistic << " df=" << r.df
            << " one-sided p(A>B)=" << r.p_value << "\n";
  return 0;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto rows = trady::read_metrics_csv(run_dir + "/metrics.csv");
  if (rows.empty()) throw std::runtime_error("report: no epochs in " + run_dir);
  auto series_of = [&](auto getter, const std::string& name) {
    trady::Series s;
    s.name = name;
    for (const auto& r : rows) {
      s.x.push_back(r.epoch);
      s.y.push_back(getter(r));
    }
    return s;
  };
  trady::render_svg_curves(
      {series_of([](const trady::EpochRow& r) { return r.train_acc; }, "train_acc"),
       series_of([](const trady::EpochRow& r) { return r.test_acc; }, "test_acc")},
      "Accuracy", "epoch", "top-1 accuracy", out_dir + "/accuracy.svg");
  trady::render_svg_curves(
      {series_of([](const trady::EpochRow& r) { return r.weight_sparsity; }, "weight_sparsity"),
       series_of([](const trady::EpochRow& r) { return r.activation_sparsity; },
                 "activation_sparsity"),
       series_of([](const trady::EpochRow& r) { return r.macs_saved_fraction; }, "macs_saved")},
      "Sparsity and compute savings (MACs)", "epoch", "fraction", out_dir + "/sparsity.svg");
  bool any_alpha = false;
  for (const auto& r : rows) any_alpha |= r.alpha_hat.has_value();
  if (any_alpha) {
    trady::Series s;
    s.name = "alpha_hat";
    for (const auto& r : rows) {
      if (r.alpha_hat.has_value()) {
        s.x.push_back(r.epoch);
        s.y.push_back(*r.alpha_hat);
      }
    }
    trady::render_svg_curves({s}, "Heavy-tail index trajectory", "epoch", "alpha",
                             out_dir + "/alpha.svg");
  }
  if (fs::exists(run_dir + "/topology.json")) {
    const json topo = read_json_file(run_dir + "/topology.json");
    const auto rgn = topo.at("layer_rgn").get<std::vector<double>>();
    double total = 0;
    for (double v : rgn) total += v;
    if (total > 0) {
      const auto curve = trady::cumulative_rgn_curve(rgn);
      trady::Series s;
      s.name = "cumulative RGN";
      for (std::size_t k = 0; k < curve.size(); ++k) {
        s.x.push_back(static_cast<double>(k + 1));
        s.y.push_back(curve[k].second);
      }
      trady::render_svg_curves({s}, "Layer RGN cumulative contribution", "top-k layers",
                               "fraction of total RGN", out_dir + "/cumulative_rgn.svg");
    }
  }
  std::cout << "wrote SVG report to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TraDy: memory-budgeted transfer learning via dynamic channel selection"};
  app.require_subcommand(1);

  CommonOpts gen_opts, pre_opts, fine_opts, prof_opts;
  int profile_epochs = 3;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic task as IDX files");
  add_common(gen, gen_opts, true);

  auto* pre = app.add_subcommand("pretrain", "dense training from random init");
  add_common(pre, pre_opts, true);

  auto* fine = app.add_subcommand("finetune", "budgeted transfer run");
  add_common(fine, fine_opts, true);

  auto* prof = app.add_subcommand("profile-layers", "layer RGN profile + top-K pool");
  add_common(prof, prof_opts, true);
  prof->add_option("--epochs", profile_epochs, "profiling epochs (default 3)");

  std::string analyze_out;
  std::vector<std::string> analyze_runs;
  auto* ana = app.add_subcommand("analyze", "Spearman / t-test matrices across run dirs");
  ana->add_option("--out", analyze_out, "output directory")->required();
  ana->add_option("runs", analyze_runs, "run directories")->required();

  std::vector<std::string> cmp_a, cmp_b;
  auto* cmp = app.add_subcommand("compare", "one-sided paired t-test on final accuracies");
  cmp->add_option("--a", cmp_a, "run dirs, strategy A")->required();
  cmp->add_option("--b", cmp_b, "run dirs, strategy B (paired with A)")->required();

  std::string report_run, report_out;
  auto* rep = app.add_subcommand("report", "SVG charts from a run directory");
  rep->add_option("--run", report_run, "run directory")->required();
  rep->add_option("--out", report_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(gen_opts);
    if (pre->parsed()) return cmd_run(pre_opts, true);
    if (fine->parsed()) return cmd_run(fine_opts, false);
    if (prof->parsed()) return cmd_profile_layers(prof_opts, profile_epochs);
    if (ana->parsed()) return cmd_analyze(analyze_out, analyze_runs);
    if (cmp->parsed()) return cmd_compare(cmp_a, cmp_b);
    if (rep->parsed()) return cmd_report(report_run, report_out);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
