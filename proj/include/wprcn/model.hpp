#pragma once

#include <optional>

#include "wprcn/aptcn.hpp"
#include "wprcn/awpg.hpp"
#include "wprcn/branches.hpp"
#include "wprcn/metrics.hpp"

namespace wprcn {

// A1 removes the probabilistic module entirely (AWPG and APTCN); A2 removes
// only the feature generator so the APTCN consumes the raw series; A3 removes
// the channel attention inside the APTCN.
enum class Ablation { kFull, kA1, kA2, kA3 };

Ablation ablation_from_string(const std::string& s);
std::string ablation_to_string(Ablation a);

struct WprcnConfig {
  AptcnConfig aptcn;
  CfcnConfig cfcn;
  std::size_t lstm_hidden = 8;
  double lstm_dropout = 0.2;
  std::size_t fusion_width = 0;  // 0: one linear from the concat to the classes
  Ablation ablation = Ablation::kFull;

  GedConfig ged;
  std::vector<std::size_t> awpg_candidates = {128, 64, 32, 16, 8, 4};
  int awpg_class = 0;  // the first class, following the one-class training setup

  std::size_t epochs = 60;
  std::size_t patience = 10;
  double lr = 1e-3;
  std::vector<double> lr_grid;  // when non-empty, searched with early stopping
  std::size_t batch_size = 16;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Concatenation -> linear -> softmax over classes.
Tensor fuse_and_classify(const Tensor& f_prob, const Tensor& f_lstm, const Tensor& f_cfcn,
                         const Linear& fusion);

// Stage-2 classifier: the three branches plus the fusion head. The AWPG is
// trained separately and stays frozen; its features arrive as inputs here.
class WprcnModel {
 public:
  WprcnModel() = default;
  WprcnModel(std::size_t input_dim, std::size_t prob_channels, std::size_t n_classes,
             const WprcnConfig& config, std::mt19937_64& rng);

  // prob_input: probabilistic features [15 x L] in full/A3 mode, the raw
  // series in A2, ignored in A1.
  Tensor logits(const Tensor& x, const Tensor* prob_input, std::size_t true_len,
                std::mt19937_64& rng, bool training) const;
  Tensor class_probabilities(const Tensor& x, const Tensor* prob_input, std::size_t true_len,
                             std::mt19937_64& rng, bool training) const;
  std::size_t predict(const Tensor& x, const Tensor* prob_input, std::size_t true_len) const;

  void register_params(ParamRegistry& reg) const;
  std::vector<BatchNormState*> bn_states() const;
  // Parameters plus batch-norm running statistics; load_state expects a model
  // built from the same configuration.
  void save_state(std::ostream& out) const;
  void load_state(std::istream& in);
  const WprcnConfig& config() const { return config_; }
  std::size_t n_classes() const { return n_classes_; }
  bool uses_prob_branch() const { return config_.ablation != Ablation::kA1; }
  bool uses_awpg() const {
    return config_.ablation == Ablation::kFull || config_.ablation == Ablation::kA3;
  }
  const AptcnNet* aptcn() const { return aptcn_ ? &*aptcn_ : nullptr; }

 private:
  WprcnConfig config_;
  std::size_t n_classes_ = 0;
  std::optional<AptcnNet> aptcn_;
  LstmBranch lstm_;
  CfcnBranch cfcn_;  // batch-norm running stats are mutable inside
  std::optional<Linear> fused_hidden_;
  Linear head_;
};

// Per-channel affine standardization of the probabilistic-branch input,
// fitted on the training split after stage 1 and frozen. The (m, j0) channels
// carry the intrinsic 2^(n j0) magnitude of the scaling functions, which
// would otherwise swamp the other branches at the fusion.
struct FeatureScaler {
  std::vector<double> mean, inv_sd;

  bool fitted() const { return !mean.empty(); }
  void fit(const std::vector<Tensor>& feature_maps);
  Tensor apply(const Tensor& features) const;
};

struct TrainedWprcn {
  WprcnConfig config;
  std::optional<AwpgModel> awpg;
  WprcnModel classifier;
  FeatureScaler scaler;
  ConfigSelection awpg_selection;
  double chosen_lr = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t trained_epochs = 0;
};

void save_scaler(std::ostream& out, const FeatureScaler& scaler);
FeatureScaler load_scaler(std::istream& in);

// Two-stage training: stage 1 trains AWPG candidates on the designated class
// of the fit portion and selects one on the held-out validation mix; stage 2
// trains the classifier end-to-end with cross-entropy while the AWPG stays
// frozen. Deterministic given config.seed.
TrainedWprcn train_wprcn(const TsDataset& train, const TsDataset& test,
                         const WprcnConfig& config);

double dataset_accuracy(const TrainedWprcn& model, const TsDataset& ds);

// Stratified index split; every class keeps at least one fit sample and, when
// it has two or more, at least one validation sample.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const TsDataset& ds, double val_fraction, std::uint64_t seed);

TsDataset subset(const TsDataset& ds, const std::vector<std::size_t>& indices);

}  // namespace wprcn
