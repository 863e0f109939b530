#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "wprcn/experiment.hpp"
#include "wprcn/model.hpp"
#include "wprcn/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wprcn;

namespace {

struct GlobalArgs {
  std::string config;
  std::string out = "out";
  std::string model_dir;
  long long seed = -1;  // -1: keep the config's seed
  std::size_t threads = 0;
  std::string ablation;
  bool verbose = false;
};

std::size_t default_threads() {
  if (const char* env = std::getenv("WPRCN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

Experiment load_config(const GlobalArgs& args) {
  if (args.config.empty()) throw ConfigError("--config is required for this command");
  Experiment exp = load_experiment(args.config);
  if (args.seed >= 0) {
    exp.model.seed = static_cast<std::uint64_t>(args.seed);
    exp.model.ged.seed = exp.model.seed;
    exp.synth.seed = exp.model.seed;
  }
  if (!args.ablation.empty()) exp.model.ablation = ablation_from_string(args.ablation);
  return exp;
}

void ensure_out(const GlobalArgs& args) { fs::create_directories(args.out); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

void write_run_log(const GlobalArgs& args, const Experiment& exp, const std::string& command) {
  json log;
  log["command"] = command;
  log["experiment"] = exp.name;
  log["config_digest"] = exp.digest;
  log["seed"] = exp.model.seed;
  log["ablation"] = ablation_to_string(exp.model.ablation);
  write_text(args.out + "/run.json", log.dump(2) + "\n");
  if (args.verbose)
    std::cerr << "[wprcn] " << command << " experiment=" << exp.name
              << " digest=" << exp.digest << " seed=" << exp.model.seed << "\n";
}

int cmd_parse_check(const std::vector<std::string>& files) {
  if (files.empty()) throw ConfigError("parse-check needs at least one .ts file");
  for (const auto& f : files) {
    TsDataset ds = parse_ts(f);
    std::cout << f << ": ok (" << ds.size() << " samples, n=" << ds.n << ", L=" << ds.length
              << ", classes=" << ds.class_count() << ")\n";
    for (const auto& w : ds.warnings) std::cerr << f << ": warning: " << w << "\n";
  }
  return 0;
}

int cmd_synth(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  if (!exp.use_synth) throw ConfigError("synth: the experiment has no synth.* keys");
  ensure_out(args);
  write_run_log(args, exp, "synth");
  auto [train, test] = [&] {
    SyntheticSpec train_spec = exp.synth;
    SyntheticSpec test_spec = exp.synth;
    test_spec.per_class = exp.synth_test_per_class;
    test_spec.seed = exp.synth.seed + 0x7E57;
    return std::make_pair(synthesize(train_spec), synthesize(test_spec));
  }();
  write_ts(train, args.out + "/" + exp.name + "_train.ts");
  write_ts(test, args.out + "/" + exp.name + "_test.ts");
  std::cout << "wrote " << train.size() << " train / " << test.size() << " test samples to "
            << args.out << "\n";
  return 0;
}

int cmd_train_awpg(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  ensure_out(args);
  write_run_log(args, exp, "train-awpg");
  auto [train, test] = load_experiment_data(exp);

  auto [fit_idx, val_idx] = stratified_split(train, exp.model.val_fraction, exp.model.seed);
  TsDataset fit_ds = subset(train, fit_idx);
  TsDataset val_ds = subset(train, val_idx);

  std::vector<AwpgModel> candidates;
  for (std::size_t i = 0; i < exp.model.awpg_candidates.size(); ++i) {
    GedConfig ged = exp.model.ged;
    ged.encoder_hidden = exp.model.awpg_candidates[i];
    ged.seed = mix_seed(exp.model.seed, 100 + i);
    candidates.push_back(train_awpg(fit_ds, exp.model.awpg_class, ged));
  }
  ConfigSelection sel = select_config(candidates, val_ds.size() >= 2 ? val_ds : train);
  candidates[sel.best_index].save_file(args.out + "/awpg.bin");

  std::ostringstream table;
  table << "candidate\tencoder_hidden\tf1\tselected\n";
  for (std::size_t i = 0; i < candidates.size(); ++i)
    table << i << "\t" << exp.model.awpg_candidates[i] << "\t" << sel.per_candidate_f1[i] << "\t"
          << (i == sel.best_index ? 1 : 0) << "\n";
  write_text(args.out + "/awpg_selection.tsv", table.str());
  std::cout << "selected candidate " << sel.best_index << " (hidden="
            << exp.model.awpg_candidates[sel.best_index] << ", f1=" << sel.f1
            << ", beta=" << sel.beta << ")\n";
  return 0;
}

int cmd_gen_features(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  ensure_out(args);
  write_run_log(args, exp, "gen-features");
  auto [train, test] = load_experiment_data(exp);

  AwpgModel awpg = [&] {
    const std::string bundled =
        (args.model_dir.empty() ? args.out : args.model_dir) + "/awpg.bin";
    if (fs::exists(bundled)) {
      std::cerr << "[wprcn] loading " << bundled << "\n";
      return AwpgModel::load_file(bundled);
    }
    GedConfig ged = exp.model.ged;
    ged.encoder_hidden = exp.model.awpg_candidates.front();
    ged.seed = mix_seed(exp.model.seed, 100);
    return train_awpg(train, exp.model.awpg_class, ged);
  }();

  const auto layout = feature_channel_layout();
  for (const auto& [split_name, ds] :
       std::vector<std::pair<std::string, const TsDataset*>>{{"train", &train}, {"test", &test}}) {
    if (ds->size() == 0) continue;
    std::ostringstream out;
    out.precision(10);
    out << "sample\tclass\tchannel\tm\tj0";
    for (std::size_t t = 0; t < ds->length; ++t) out << "\tt" << t;
    out << "\n";
    for (std::size_t s = 0; s < ds->size(); ++s) {
      Tensor p = awpg.generate_features(ds->sample_tensor(s));
      for (std::size_t c = 0; c < layout.size(); ++c) {
        out << s << "\t" << ds->class_names[ds->labels[s]] << "\t" << c << "\t"
            << layout[c].first << "\t" << layout[c].second;
        for (std::size_t t = 0; t < ds->length; ++t) out << "\t" << p(c, t);
        out << "\n";
      }
    }
    write_text(args.out + "/features_" + split_name + ".tsv", out.str());
  }
  std::cout << "wrote per-channel feature dumps to " << args.out << "\n";
  return 0;
}

json trained_summary(const Experiment& exp, const TrainedWprcn& trained) {
  json j;
  j["experiment"] = exp.name;
  j["config_digest"] = exp.digest;
  j["seed"] = trained.config.seed;
  j["ablation"] = ablation_to_string(trained.config.ablation);
  j["test_accuracy"] = trained.test_accuracy;
  j["val_accuracy"] = trained.val_accuracy;
  j["chosen_lr"] = trained.chosen_lr;
  j["epochs_run"] = trained.trained_epochs;
  if (trained.awpg) {
    j["awpg"]["beta"] = trained.awpg->beta();
    j["awpg"]["f1"] = trained.awpg_selection.f1;
    j["awpg"]["encoder_hidden"] = trained.awpg->config().encoder_hidden;
  }
  return j;
}

int cmd_train(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  ensure_out(args);
  write_run_log(args, exp, "train");
  auto [train, test] = load_experiment_data(exp);
  TrainedWprcn trained = train_wprcn(train, test, exp.model);

  EvalReport report = evaluate_table({exp.name}, {ablation_to_string(exp.model.ablation)},
                                     {{trained.test_accuracy}}, exp.model.seed, exp.digest);
  write_text(args.out + "/report.tsv", report_to_tsv(report));
  write_text(args.out + "/summary.json", trained_summary(exp, trained).dump(2) + "\n");
  if (trained.awpg) trained.awpg->save_file(args.out + "/awpg.bin");
  {
    std::ofstream f(args.out + "/classifier.bin", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write classifier checkpoint");
    trained.classifier.save_state(f);
    save_scaler(f, trained.scaler);
  }
  std::cout << "test accuracy " << trained.test_accuracy << " (val " << trained.val_accuracy
            << ", lr " << trained.chosen_lr << ", " << trained.trained_epochs << " epochs)\n";
  return 0;
}

int cmd_eval(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  if (args.model_dir.empty())
    throw ConfigError("eval needs --model <dir> with awpg.bin/classifier.bin from train");
  ensure_out(args);
  write_run_log(args, exp, "eval");
  auto [train, test] = load_experiment_data(exp);
  const TsDataset& target = test.size() > 0 ? test : train;

  TrainedWprcn trained;
  trained.config = exp.model;
  const bool needs_awpg =
      exp.model.ablation == Ablation::kFull || exp.model.ablation == Ablation::kA3;
  if (needs_awpg) trained.awpg = AwpgModel::load_file(args.model_dir + "/awpg.bin");
  auto rng = make_rng(exp.model.seed, 0xC1A55);
  trained.classifier = WprcnModel(
      train.n, trained.awpg ? trained.awpg->feature_channels() : 15, train.class_count(),
      exp.model, rng);
  std::ifstream f(args.model_dir + "/classifier.bin", std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + args.model_dir + "/classifier.bin'");
  trained.classifier.load_state(f);
  trained.scaler = load_scaler(f);

  const double acc = dataset_accuracy(trained, target);
  EvalReport report = evaluate_table({exp.name}, {ablation_to_string(exp.model.ablation)},
                                     {{acc}}, exp.model.seed, exp.digest);
  write_text(args.out + "/report.tsv", report_to_tsv(report));
  json j;
  j["experiment"] = exp.name;
  j["config_digest"] = exp.digest;
  j["seed"] = exp.model.seed;
  j["accuracy"] = acc;
  write_text(args.out + "/summary.json", j.dump(2) + "\n");
  std::cout << "accuracy " << acc << "\n";
  return 0;
}

int cmd_ablate(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  ensure_out(args);
  write_run_log(args, exp, "ablate");
  auto [train, test] = load_experiment_data(exp);

  const std::vector<Ablation> modes = {Ablation::kA1, Ablation::kA2, Ablation::kA3,
                                       Ablation::kFull};
  struct Run {
    Ablation mode;
    std::uint64_t seed;
  };
  std::vector<Run> runs;
  for (Ablation m : modes)
    for (std::size_t s = 0; s < exp.seeds; ++s)
      runs.push_back({m, exp.model.seed + s});

  const std::size_t threads = args.threads > 0 ? args.threads : default_threads();
  std::vector<double> accuracy(runs.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      WprcnConfig cfg = exp.model;
      cfg.ablation = runs[i].mode;
      cfg.seed = runs[i].seed;
      cfg.ged.seed = runs[i].seed;
      accuracy[i] = train_wprcn(train, test, cfg).test_accuracy;
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream table;
  table << "mode";
  for (std::size_t s = 0; s < exp.seeds; ++s) table << "\tseed" << exp.model.seed + s;
  table << "\tmean\n";
  json summary;
  summary["experiment"] = exp.name;
  summary["config_digest"] = exp.digest;
  summary["seeds"] = exp.seeds;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    table << ablation_to_string(modes[m]);
    double mean = 0.0;
    for (std::size_t s = 0; s < exp.seeds; ++s) {
      const double acc = accuracy[m * exp.seeds + s];
      table << "\t" << acc;
      mean += acc;
    }
    mean /= static_cast<double>(exp.seeds);
    table << "\t" << mean << "\n";
    summary["mean_accuracy"][ablation_to_string(modes[m])] = mean;
  }
  write_text(args.out + "/ablation.tsv", table.str());
  write_text(args.out + "/summary.json", summary.dump(2) + "\n");
  std::cout << table.str();
  return 0;
}

int cmd_bench_density(const GlobalArgs& args) {
  Experiment exp = load_config(args);
  ensure_out(args);
  write_run_log(args, exp, "bench-density");

  SyntheticSpec spec = exp.synth;
  spec.kind = SyntheticKind::kDriftingMean;
  spec.classes = 1;
  spec.n = 1;
  spec.per_class = 1;
  if (spec.length < 1000) spec.length = 4000;
  TsDataset stream = synthesize(spec);
  normalize_and_pad(stream);

  DensityState state(bspline_order_from_int(exp.model.ged.latent_m), exp.model.ged.latent_j0, 1);
  const auto& alphas = state.receptive_fields().alphas;
  const double pre_mode = stream.value(0, 0, spec.length / 8);
  const double post_mode = stream.value(0, 0, spec.length - 4);

  std::ostringstream out;
  out.precision(10);
  out << "step\tvalue\ttouched";
  for (double a : alphas) out << "\tp_pre_a" << a << "\tp_post_a" << a;
  out << "\n";
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double v = stream.value(0, 0, t);
    state.update({v});
    if (t % 10 != 0) continue;
    out << t << "\t" << v << "\t" << state.last_update_touched();
    const auto pre = state.density({pre_mode});
    const auto post = state.density({post_mode});
    for (std::size_t g = 0; g < alphas.size(); ++g) out << "\t" << pre[g] << "\t" << post[g];
    out << "\n";
  }
  write_text(args.out + "/bench_density.tsv", out.str());
  std::cout << "wrote density tracking table (" << spec.length << " updates) to " << args.out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet probabilistic recurrent convolutional network toolkit"};
  app.require_subcommand(1);

  GlobalArgs args;
  std::vector<std::string> parse_files;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config) cmd->add_option("--config", args.config, "experiment file");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--threads", args.threads, "worker threads (default WPRCN_THREADS or 1)");
    cmd->add_option("--ablation", args.ablation, "a1|a2|a3|full");
    cmd->add_flag("-v,--verbose", args.verbose, "log to stderr");
  };

  CLI::App* parse_cmd = app.add_subcommand("parse-check", "validate .ts files");
  parse_cmd->add_option("files", parse_files, "time-series files");
  add_common(parse_cmd, false);

  add_common(app.add_subcommand("synth", "generate synthetic .ts splits"));
  add_common(app.add_subcommand("train-awpg", "stage-1 feature generator training"));
  CLI::App* gen_cmd = app.add_subcommand("gen-features", "dump probabilistic features");
  add_common(gen_cmd);
  gen_cmd->add_option("--model", args.model_dir, "directory with awpg.bin");
  add_common(app.add_subcommand("train", "two-stage training plus evaluation"));
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate saved checkpoints");
  add_common(eval_cmd);
  eval_cmd->add_option("--model", args.model_dir, "directory with awpg.bin/classifier.bin");
  add_common(app.add_subcommand("ablate", "run a1, a2, a3 and full"));
  add_common(app.add_subcommand("bench-density", "drift-tracking density benchmark"));

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("parse-check")) return cmd_parse_check(parse_files);
    if (app.got_subcommand("synth")) return cmd_synth(args);
    if (app.got_subcommand("train-awpg")) return cmd_train_awpg(args);
    if (app.got_subcommand("gen-features")) return cmd_gen_features(args);
    if (app.got_subcommand("train")) return cmd_train(args);
    if (app.got_subcommand("eval")) return cmd_eval(args);
    if (app.got_subcommand("ablate")) return cmd_ablate(args);
    if (app.got_subcommand("bench-density")) return cmd_bench_density(args);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TsFormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
