#include "wprcn/awpg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "wprcn/checkpoint.hpp"
#include "wprcn/ops.hpp"
#include "wprcn/optim.hpp"
#include "wprcn/rng.hpp"

namespace wprcn {

std::vector<std::pair<int, int>> feature_channel_layout() {
  std::vector<std::pair<int, int>> layout;
  for (int m : {2, 3, 4})
    for (int j0 : {1, 2, 3, 4, 5}) layout.emplace_back(m, j0);
  return layout;
}

namespace {

std::vector<DensityState> make_feature_states() {
  std::vector<DensityState> states;
  for (auto [m, j0] : feature_channel_layout())
    states.emplace_back(bspline_order_from_int(m), j0, GedConfig::kLatentDim);
  return states;
}

std::vector<double> tensor_to_vec(const Tensor& t) {
  return std::vector<double>(t.data(), t.data() + t.size());
}

}  // namespace

AwpgModel::AwpgModel(std::size_t input_dim, const GedConfig& config)
    : input_dim_(input_dim),
      config_(config),
      latent_density_(bspline_order_from_int(config.latent_m), config.latent_j0,
                      GedConfig::kLatentDim),
      feature_densities_(make_feature_states()) {
  check(input_dim >= 1, "awpg: input dimension must be >= 1");
  check(config.lambda >= 0.0, "awpg: lambda must be >= 0");
  auto rng = make_rng(config.seed, 0xA36);
  enc_outer_ = GruLayer(input_dim, config.encoder_hidden, rng);
  enc_latent_ = GruLayer(config.encoder_hidden, GedConfig::kLatentDim, rng);
  dec_latent_ = GruLayer(GedConfig::kLatentDim, GedConfig::kLatentDim, rng);
  dec_outer_ = GruLayer(GedConfig::kLatentDim, config.encoder_hidden, rng);
  dec_head_ = Linear(config.encoder_hidden, input_dim, rng);
  adapt_hidden_ = Linear(GedConfig::kLatentDim, 10, rng);
  adapt_out_ = Linear(10, latent_density_.receptive_fields().size(), rng);
}

LatentSequence AwpgModel::encode(const Tensor& x) const {
  check(x.ndim() == 2 && x.dim(0) == input_dim_, "encode: input must be [n x L]");
  check(x.dim(1) >= 1, "encode: empty sequence");
  Tensor x_seq = transpose(x);  // [L x n]
  auto [h1_seq, h1] = enc_outer_.forward(x_seq);
  auto [h2_seq, h2] = enc_latent_.forward(h1_seq);
  Tensor y_e = logistic(h2_seq);  // bound the latents into the unit square
  Tensor h_l = row(y_e, x.dim(1) - 1);
  return {y_e, h_l};
}

Tensor AwpgModel::reconstruct(const Tensor& h_l, std::size_t length) const {
  check(h_l.size() == GedConfig::kLatentDim, "reconstruct: latent state must be 2-d");
  check(length >= 1, "reconstruct: empty sequence");
  Tensor zeros({length, GedConfig::kLatentDim}, 0.0);
  auto [d1_seq, d1] = dec_latent_.forward(zeros, h_l);
  auto [d2_seq, d2] = dec_outer_.forward(d1_seq);
  std::vector<Tensor> steps;
  steps.reserve(length);
  for (std::size_t t = 0; t < length; ++t) steps.push_back(dec_head_(row(d2_seq, t)));
  return transpose(stack_rows(steps));  // [n x L]
}

std::pair<Tensor, std::size_t> AwpgModel::adaptive_select(const Tensor& h_l) const {
  Tensor theta = softmax(adapt_out_(tanh_op(adapt_hidden_(h_l))));
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (theta(i) > theta(best)) best = i;
  return {theta, best};
}

Tensor AwpgModel::loss(const std::vector<Tensor>& batch) const {
  check(!batch.empty(), "awpg loss: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  Tensor total = Tensor::scalar(0.0);
  for (const Tensor& x : batch) {
    LatentSequence lat = encode(x);
    Tensor recon = reconstruct(lat.h_l, x.dim(1));
    Tensor term = l1_loss(x, recon);
    if (config_.lambda > 0.0) {
      auto [theta, index] = adaptive_select(lat.h_l);
      Tensor p_hat = Tensor::from({gamma()}, latent_density_.density(tensor_to_vec(lat.h_l)));
      term = sub(term, scale(log_floored(dot(p_hat, theta)), config_.lambda));
    }
    total = add(total, scale(term, inv_b));
  }
  return total;
}

Tensor AwpgModel::generate_features(const Tensor& x) const {
  check(features_ready_, "generate_features: feature densities are untrained");
  LatentSequence lat = encode(x);
  auto [theta, index] = adaptive_select(lat.h_l);
  const std::size_t L = x.dim(1);
  Tensor out({feature_densities_.size(), L});
  for (std::size_t t = 0; t < L; ++t) {
    std::vector<double> point = {lat.y_e(t, 0), lat.y_e(t, 1)};
    for (std::size_t c = 0; c < feature_densities_.size(); ++c)
      out(c, t) = feature_densities_[c].density(point)[index];
  }
  return out;
}

void AwpgModel::register_params(ParamRegistry& reg) const {
  enc_outer_.register_params(reg, "awpg.enc1");
  enc_latent_.register_params(reg, "awpg.enc2");
  dec_latent_.register_params(reg, "awpg.dec1");
  dec_outer_.register_params(reg, "awpg.dec2");
  dec_head_.register_params(reg, "awpg.dec_head");
  adapt_hidden_.register_params(reg, "awpg.adapt1");
  adapt_out_.register_params(reg, "awpg.adapt2");
}

AwpgModel train_awpg(const TsDataset& train, int class_index, const GedConfig& config) {
  check(train.size() > 0, "train_awpg: empty dataset");
  std::vector<std::size_t> members;
  for (std::size_t s = 0; s < train.size(); ++s)
    if (train.labels[s] == class_index) members.push_back(s);
  check(!members.empty(),
        "train_awpg: class " + std::to_string(class_index) + " absent from split");

  AwpgModel model(train.n, config);
  model.set_trained_class(class_index);
  ParamRegistry reg;
  model.register_params(reg);
  Adam opt(config.lr);

  std::vector<Tensor> inputs;
  inputs.reserve(members.size());
  for (std::size_t s : members) inputs.push_back(train.sample_tensor(s));

  const std::size_t bs = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t start = 0; start < inputs.size(); start += bs) {
      const std::size_t stop = std::min(start + bs, inputs.size());
      std::vector<Tensor> batch(inputs.begin() + start, inputs.begin() + stop);
      // Stream the latent density over the batch before the loss sees it.
      for (const Tensor& x : batch) {
        LatentSequence lat = model.encode(x);
        model.latent_density().update(
            {lat.h_l(0), lat.h_l(1)});
      }
      reg.zero_grad();
      Tensor loss = model.loss(batch);
      loss.backward();
      opt.step(reg);
    }
  }

  // Feature densities use a fresh weight set streamed over the trained
  // class's latent sequences in dataset order.
  for (const Tensor& x : inputs) {
    LatentSequence lat = model.encode(x);
    for (std::size_t t = 0; t < x.dim(1); ++t) {
      std::vector<double> point = {lat.y_e(t, 0), lat.y_e(t, 1)};
      for (auto& state : model.feature_densities()) state.update(point);
    }
  }
  model.set_features_ready(true);
  return model;
}

std::pair<double, double> f1_threshold_sweep(const std::vector<double>& densities,
                                             const std::vector<bool>& is_unseen) {
  check(densities.size() == is_unseen.size() && !densities.empty(),
        "f1 sweep: extent mismatch or empty");
  std::vector<double> thresholds(densities);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

  double best_beta = thresholds.front();
  double best_f1 = -1.0;
  for (double beta : thresholds) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
      const bool pred = densities[i] < beta;
      if (pred && is_unseen[i]) ++tp;
      if (pred && !is_unseen[i]) ++fp;
      if (!pred && is_unseen[i]) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    const double f1 = denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
    if (f1 > best_f1) {  // strict: ties keep the smaller beta
      best_f1 = f1;
      best_beta = beta;
    }
  }
  return {best_beta, best_f1};
}

ConfigSelection select_config(std::vector<AwpgModel>& candidates, const TsDataset& validation) {
  check(!candidates.empty(), "select_config: no candidates");
  bool any_trained = false, any_unseen = false;
  const int cls = candidates.front().trained_class();
  for (int label : validation.labels) (label == cls ? any_trained : any_unseen) = true;
  check(any_trained && any_unseen,
        "select_config: validation mix needs the trained class and at least one other");

  ConfigSelection sel;
  double best_f1 = -1.0, best_beta = 0.0;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    AwpgModel& model = candidates[ci];
    std::vector<double> dens;
    std::vector<bool> unseen;
    dens.reserve(validation.size());
    for (std::size_t s = 0; s < validation.size(); ++s) {
      LatentSequence lat = model.encode(validation.sample_tensor(s));
      auto [theta, index] = model.adaptive_select(lat.h_l);
      const auto p = model.latent_density().density({lat.h_l(0), lat.h_l(1)});
      dens.push_back(p[index]);
      unseen.push_back(validation.labels[s] != model.trained_class());
    }
    auto [beta, f1] = f1_threshold_sweep(dens, unseen);
    sel.per_candidate_f1.push_back(f1);
    // max F1, then smaller beta, then the earlier candidate
    if (f1 > best_f1 || (f1 == best_f1 && beta < best_beta)) {
      best_f1 = f1;
      best_beta = beta;
      sel.best_index = ci;
    }
  }
  sel.beta = best_beta;
  sel.f1 = best_f1;
  candidates[sel.best_index].set_beta(best_beta);
  return sel;
}

void AwpgModel::save(std::ostream& out) const {
  const char magic[8] = {'W', 'P', 'R', 'C', 'N', 'A', 'W', 'P'};
  out.write(magic, 8);
  const std::uint32_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t fields[4] = {static_cast<std::uint64_t>(input_dim_),
                                   static_cast<std::uint64_t>(config_.encoder_hidden),
                                   static_cast<std::uint64_t>(trained_class_),
                                   static_cast<std::uint64_t>(features_ready_ ? 1 : 0)};
  out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
  const double scalars[5] = {config_.lambda, config_.lr, beta_,
                             static_cast<double>(config_.latent_m),
                             static_cast<double>(config_.latent_j0)};
  out.write(reinterpret_cast<const char*>(scalars), sizeof(scalars));
  ParamRegistry reg;
  register_params(reg);
  save_params(out, reg);
  save_density(out, latent_density_);
  for (const auto& state : feature_densities_) save_density(out, state);
}

AwpgModel AwpgModel::load(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "WPRCNAWP")
    throw std::runtime_error("checkpoint: bad awpg bundle header");
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != 1) throw std::runtime_error("checkpoint: unsupported awpg version");
  std::uint64_t fields[4];
  in.read(reinterpret_cast<char*>(fields), sizeof(fields));
  double scalars[5];
  in.read(reinterpret_cast<char*>(scalars), sizeof(scalars));
  if (!in) throw std::runtime_error("checkpoint: truncated awpg bundle");
  GedConfig config;
  config.encoder_hidden = fields[1];
  config.lambda = scalars[0];
  config.lr = scalars[1];
  config.latent_m = static_cast<int>(scalars[3]);
  config.latent_j0 = static_cast<int>(scalars[4]);
  AwpgModel model(fields[0], config);
  model.trained_class_ = static_cast<int>(fields[2]);
  model.features_ready_ = fields[3] != 0;
  model.beta_ = scalars[2];
  ParamRegistry reg;
  model.register_params(reg);
  load_params(in, reg);
  model.latent_density_ = load_density(in);
  for (auto& state : model.feature_densities_) state = load_density(in);
  return model;
}

void AwpgModel::save_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  save(f);
}

AwpgModel AwpgModel::load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return load(f);
}

}  // namespace wprcn
