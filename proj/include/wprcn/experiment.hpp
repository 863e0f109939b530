#pragma once

#include "wprcn/model.hpp"
#include "wprcn/synthetic.hpp"

namespace wprcn {

// Thrown on malformed experiment files; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment: either a pair of .ts paths or a synthetic spec, plus the
// model configuration. Parsed from `key = value` lines; '#' starts a comment.
struct Experiment {
  std::string name = "experiment";
  std::string train_path, test_path;
  bool use_synth = false;
  SyntheticSpec synth;
  std::size_t synth_test_per_class = 20;
  WprcnConfig model;
  std::size_t seeds = 1;  // seed-averaged runs for train/ablate
  std::string digest;     // FNV-1a of the raw file text
};

Experiment parse_experiment_text(const std::string& text, const std::string& name = "inline");
Experiment load_experiment(const std::string& path);

std::string fnv1a_digest(const std::string& text);

// Loads the train/test splits named by the experiment (parsing or
// synthesizing), normalized and padded from the training split's statistics.
std::pair<TsDataset, TsDataset> load_experiment_data(const Experiment& exp);

}  // namespace wprcn
