#pragma once

#include <iosfwd>
#include <optional>

#include "wprcn/density.hpp"
#include "wprcn/layers.hpp"
#include "wprcn/ts_io.hpp"

namespace wprcn {

// GRU encoder-decoder configuration. The encoder is two stacked GRU layers
// whose final output size is fixed to the 2-d latent; the decoder mirrors it
// in ascending order. Only the outer size takes part in the candidate search.
struct GedConfig {
  std::size_t encoder_hidden = 16;
  double lambda = 0.1;
  std::size_t batch_size = 16;
  std::size_t epochs = 20;
  double lr = 1e-3;
  int latent_m = 2;   // density used by the joint loss
  int latent_j0 = 3;
  std::uint64_t seed = 0;

  static constexpr std::size_t kLatentDim = 2;
};

// Encoder output sequence (per-timestep points in the unit square, enforced
// by the logistic bounding activation) plus the final hidden state.
struct LatentSequence {
  Tensor y_e;  // [L x 2]
  Tensor h_l;  // [2], equals y_e[L-1]
};

// Adaptive Wavelet Probabilistic Feature Generator: GRU encoder-decoder
// latent space, streaming wavelet densities over the latents, and a small
// network that predicts softmax weights over the receptive-field ensemble.
class AwpgModel {
 public:
  AwpgModel(std::size_t input_dim, const GedConfig& config);

  LatentSequence encode(const Tensor& x) const;  // x: [n x L]
  Tensor reconstruct(const Tensor& h_l, std::size_t length) const;  // -> [n x L]
  // Softmax weights over the ensemble and the argmax index (lowest wins ties).
  std::pair<Tensor, std::size_t> adaptive_select(const Tensor& h_l) const;

  // Joint loss over a batch: mean elementwise L1 reconstruction error minus
  // lambda * mean log(p_hat(h_L) . theta). The density vector is evaluated
  // against the current latent state and treated as a constant; gradient
  // reaches the encoder through the reconstruction and theta paths.
  Tensor loss(const std::vector<Tensor>& batch) const;

  // The probabilistic feature ensemble: one channel per (m, j0) combination,
  // each of length L, selected at the predicted index I.
  Tensor generate_features(const Tensor& x) const;  // -> [channels x L]

  void register_params(ParamRegistry& reg) const;
  const GedConfig& config() const { return config_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t gamma() const { return latent_density_.receptive_fields().size(); }
  std::size_t feature_channels() const { return feature_densities_.size(); }

  DensityState& latent_density() { return latent_density_; }
  const DensityState& latent_density() const { return latent_density_; }
  std::vector<DensityState>& feature_densities() { return feature_densities_; }
  const std::vector<DensityState>& feature_densities() const { return feature_densities_; }

  double beta() const { return beta_; }
  void set_beta(double b) { beta_ = b; }
  int trained_class() const { return trained_class_; }
  void set_trained_class(int c) { trained_class_ = c; }
  bool features_ready() const { return features_ready_; }
  void set_features_ready(bool b) { features_ready_ = b; }

  void save(std::ostream& out) const;
  static AwpgModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static AwpgModel load_file(const std::string& path);

 private:
  std::size_t input_dim_;
  GedConfig config_;
  GruLayer enc_outer_, enc_latent_;
  GruLayer dec_latent_, dec_outer_;
  Linear dec_head_;
  Linear adapt_hidden_, adapt_out_;  // 2 -> 10 -> gamma
  DensityState latent_density_;
  std::vector<DensityState> feature_densities_;  // (m, j0) in {2,3,4} x {1..5}
  double beta_ = 0.0;
  int trained_class_ = 0;
  bool features_ready_ = false;
};

// The (m, j0) channel layout shared by feature generation and reporting.
std::vector<std::pair<int, int>> feature_channel_layout();

// Unsupervised stage-1 training on one class of the split: per batch the
// latent density is stream-updated on every h_L, then the joint loss is
// backpropagated through the encoder-decoder and adaptive network only.
// Afterwards a fresh set of feature densities is streamed over the trained
// class's latent sequences in dataset order.
AwpgModel train_awpg(const TsDataset& train, int class_index, const GedConfig& config);

// One-class threshold selection for one candidate: positives are
// unseen-class samples, predicted when the selected density falls below beta.
// Returns (beta, f1). Thresholds sweep the sorted unique density values plus
// a sentinel above the maximum so the all-positive predictor is reachable.
std::pair<double, double> f1_threshold_sweep(const std::vector<double>& densities,
                                             const std::vector<bool>& is_unseen);

struct ConfigSelection {
  std::size_t best_index = 0;
  double beta = 0.0;
  double f1 = 0.0;
  std::vector<double> per_candidate_f1;
};

// Scores every candidate on a validation mix that must contain both the
// trained class and at least one other class; ties prefer the smaller beta,
// then the earlier candidate. The winner's beta is stored on the model.
ConfigSelection select_config(std::vector<AwpgModel>& candidates, const TsDataset& validation);

}  // namespace wprcn
