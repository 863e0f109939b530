#include "wprcn/model.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "wprcn/checkpoint.hpp"
#include "wprcn/ops.hpp"
#include "wprcn/optim.hpp"
#include "wprcn/rng.hpp"

namespace wprcn {

Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::kFull;
  if (s == "a1") return Ablation::kA1;
  if (s == "a2") return Ablation::kA2;
  if (s == "a3") return Ablation::kA3;
  throw std::invalid_argument("unknown ablation '" + s + "' (expected a1|a2|a3|full)");
}

std::string ablation_to_string(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kA1: return "a1";
    case Ablation::kA2: return "a2";
    case Ablation::kA3: return "a3";
  }
  return "full";
}

Tensor fuse_and_classify(const Tensor& f_prob, const Tensor& f_lstm, const Tensor& f_cfcn,
                         const Linear& fusion) {
  return softmax(fusion(concat({f_prob, f_lstm, f_cfcn})));
}

WprcnModel::WprcnModel(std::size_t input_dim, std::size_t prob_channels, std::size_t n_classes,
                       const WprcnConfig& config, std::mt19937_64& rng)
    : config_(config), n_classes_(n_classes) {
  check(n_classes >= 2, "classifier: need at least two classes");
  std::size_t fused_in = 0;
  if (config.ablation != Ablation::kA1) {
    AptcnConfig ac = config.aptcn;
    ac.in_channels = config.ablation == Ablation::kA2 ? input_dim : prob_channels;
    ac.use_eca = config.ablation != Ablation::kA3 && ac.use_eca;
    aptcn_.emplace(ac, rng);
    fused_in += aptcn_->output_dim();
  }
  lstm_ = LstmBranch(input_dim, config.lstm_hidden, config.lstm_dropout, rng);
  cfcn_ = CfcnBranch(input_dim, config.cfcn, rng);
  fused_in += lstm_.output_dim() + cfcn_.output_dim();
  if (config.fusion_width > 0) {
    fused_hidden_ = Linear(fused_in, config.fusion_width, rng);
    head_ = Linear(config.fusion_width, n_classes, rng);
  } else {
    head_ = Linear(fused_in, n_classes, rng);
  }
}

Tensor WprcnModel::logits(const Tensor& x, const Tensor* prob_input, std::size_t true_len,
                          std::mt19937_64& rng, bool training) const {
  std::vector<Tensor> feats;
  if (aptcn_) {
    check(prob_input != nullptr, "classifier: probabilistic branch input missing");
    feats.push_back(aptcn_->forward(*prob_input, rng, training));
  }
  feats.push_back(lstm_.forward(x, rng, training));
  feats.push_back(cfcn_.forward(x, training, true_len));
  Tensor fused = concat(feats);
  if (fused_hidden_) fused = relu((*fused_hidden_)(fused));
  return head_(fused);
}

Tensor WprcnModel::class_probabilities(const Tensor& x, const Tensor* prob_input,
                                       std::size_t true_len, std::mt19937_64& rng,
                                       bool training) const {
  return softmax(logits(x, prob_input, true_len, rng, training));
}

std::size_t WprcnModel::predict(const Tensor& x, const Tensor* prob_input,
                                std::size_t true_len) const {
  auto rng = make_rng(0);  // unused in eval mode
  Tensor l = logits(x, prob_input, true_len, rng, false);
  std::size_t best = 0;
  for (std::size_t i = 1; i < l.size(); ++i)
    if (l(i) > l(best)) best = i;
  return best;
}

void WprcnModel::register_params(ParamRegistry& reg) const {
  if (aptcn_) aptcn_->register_params(reg, "aptcn");
  lstm_.register_params(reg, "lstm");
  cfcn_.register_params(reg, "cfcn");
  if (fused_hidden_) fused_hidden_->register_params(reg, "fusion.hidden");
  head_.register_params(reg, "fusion.head");
}

std::vector<BatchNormState*> WprcnModel::bn_states() const { return cfcn_.bn_states(); }

void WprcnModel::save_state(std::ostream& out) const {
  ParamRegistry reg;
  register_params(reg);
  save_params(out, reg);
  const auto bns = bn_states();
  const std::uint32_t count = static_cast<std::uint32_t>(bns.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const BatchNormState* st : bns) {
    const std::uint64_t ch = st->running_mean.size();
    out.write(reinterpret_cast<const char*>(&ch), sizeof(ch));
    out.write(reinterpret_cast<const char*>(st->running_mean.data()),
              static_cast<std::streamsize>(ch * sizeof(double)));
    out.write(reinterpret_cast<const char*>(st->running_var.data()),
              static_cast<std::streamsize>(ch * sizeof(double)));
  }
}

void WprcnModel::load_state(std::istream& in) {
  ParamRegistry reg;
  register_params(reg);
  load_params(in, reg);
  std::uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  const auto bns = bn_states();
  if (!in || count != bns.size())
    throw std::runtime_error("checkpoint: batchnorm state count mismatch");
  for (BatchNormState* st : bns) {
    std::uint64_t ch = 0;
    in.read(reinterpret_cast<char*>(&ch), sizeof(ch));
    st->running_mean.assign(ch, 0.0);
    st->running_var.assign(ch, 0.0);
    in.read(reinterpret_cast<char*>(st->running_mean.data()),
            static_cast<std::streamsize>(ch * sizeof(double)));
    in.read(reinterpret_cast<char*>(st->running_var.data()),
            static_cast<std::streamsize>(ch * sizeof(double)));
    st->initialized = true;
    if (!in) throw std::runtime_error("checkpoint: truncated batchnorm state");
  }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const TsDataset& ds, double val_fraction, std::uint64_t seed) {
  check(val_fraction >= 0.0 && val_fraction < 1.0, "split: fraction must be in [0,1)");
  std::vector<std::vector<std::size_t>> by_class(ds.class_count());
  for (std::size_t s = 0; s < ds.size(); ++s) {
    check(ds.labels[s] >= 0, "split: unlabelled sample");
    by_class[static_cast<std::size_t>(ds.labels[s])].push_back(s);
  }
  std::vector<std::size_t> fit, val;
  auto rng = make_rng(seed, 0x5E17);
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    std::size_t take = static_cast<std::size_t>(val_fraction * static_cast<double>(members.size()));
    if (val_fraction > 0.0 && members.size() >= 2 && take == 0) take = 1;
    if (take >= members.size()) take = members.size() - 1;
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < take ? val : fit).push_back(members[i]);
  }
  std::sort(fit.begin(), fit.end());
  std::sort(val.begin(), val.end());
  return {fit, val};
}

TsDataset subset(const TsDataset& ds, const std::vector<std::size_t>& indices) {
  TsDataset out;
  out.name = ds.name;
  out.n = ds.n;
  out.length = ds.length;
  out.equal_length = ds.equal_length;
  out.class_names = ds.class_names;
  out.normalized = ds.normalized;
  out.feat_min = ds.feat_min;
  out.feat_max = ds.feat_max;
  for (std::size_t i : indices) {
    out.series.push_back(ds.series[i]);
    out.true_lengths.push_back(ds.true_lengths[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

void FeatureScaler::fit(const std::vector<Tensor>& feature_maps) {
  check(!feature_maps.empty(), "scaler: no feature maps");
  const std::size_t ch = feature_maps[0].dim(0);
  mean.assign(ch, 0.0);
  inv_sd.assign(ch, 1.0);
  std::vector<double> sq(ch, 0.0);
  std::size_t count = 0;
  for (const Tensor& f : feature_maps) {
    check(f.dim(0) == ch, "scaler: channel count drift");
    const std::size_t L = f.dim(1);
    count += L;
    for (std::size_t c = 0; c < ch; ++c)
      for (std::size_t t = 0; t < L; ++t) {
        mean[c] += f(c, t);
        sq[c] += f(c, t) * f(c, t);
      }
  }
  for (std::size_t c = 0; c < ch; ++c) {
    mean[c] /= static_cast<double>(count);
    const double var = sq[c] / static_cast<double>(count) - mean[c] * mean[c];
    inv_sd[c] = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  }
}

Tensor FeatureScaler::apply(const Tensor& features) const {
  if (!fitted()) return features;
  check(features.dim(0) == mean.size(), "scaler: channel count mismatch");
  Tensor out(features.shape());
  const std::size_t L = features.dim(1);
  for (std::size_t c = 0; c < mean.size(); ++c)
    for (std::size_t t = 0; t < L; ++t)
      out(c, t) = (features(c, t) - mean[c]) * inv_sd[c];
  return out;
}

void save_scaler(std::ostream& out, const FeatureScaler& scaler) {
  const std::uint64_t ch = scaler.mean.size();
  out.write(reinterpret_cast<const char*>(&ch), sizeof(ch));
  out.write(reinterpret_cast<const char*>(scaler.mean.data()),
            static_cast<std::streamsize>(ch * sizeof(double)));
  out.write(reinterpret_cast<const char*>(scaler.inv_sd.data()),
            static_cast<std::streamsize>(ch * sizeof(double)));
}

FeatureScaler load_scaler(std::istream& in) {
  std::uint64_t ch = 0;
  in.read(reinterpret_cast<char*>(&ch), sizeof(ch));
  FeatureScaler scaler;
  scaler.mean.assign(ch, 0.0);
  scaler.inv_sd.assign(ch, 1.0);
  in.read(reinterpret_cast<char*>(scaler.mean.data()),
          static_cast<std::streamsize>(ch * sizeof(double)));
  in.read(reinterpret_cast<char*>(scaler.inv_sd.data()),
          static_cast<std::streamsize>(ch * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated feature scaler");
  return scaler;
}

namespace {

struct Snapshot {
  std::vector<std::vector<double>> values;
  std::vector<BatchNormState> bn;
};

Snapshot take_snapshot(const ParamRegistry& reg, const std::vector<BatchNormState*>& bn) {
  Snapshot s;
  for (const auto& [name, t] : reg.items) s.values.push_back(t.values());
  for (auto* st : bn) s.bn.push_back(*st);
  return s;
}

void restore_snapshot(const Snapshot& s, ParamRegistry& reg,
                      const std::vector<BatchNormState*>& bn) {
  for (std::size_t i = 0; i < reg.items.size(); ++i) reg.items[i].second.values() = s.values[i];
  for (std::size_t i = 0; i < bn.size(); ++i) *bn[i] = s.bn[i];
}

struct PreparedSamples {
  std::vector<Tensor> inputs;
  std::vector<Tensor> prob_inputs;  // empty in A1 mode
  std::vector<std::size_t> true_lens;
  std::vector<int> labels;
};

PreparedSamples prepare(const TsDataset& ds, const WprcnConfig& config,
                        const std::optional<AwpgModel>& awpg, const FeatureScaler& scaler) {
  PreparedSamples out;
  const bool needs_awpg =
      config.ablation == Ablation::kFull || config.ablation == Ablation::kA3;
  const bool has_prob = config.ablation != Ablation::kA1;
  for (std::size_t s = 0; s < ds.size(); ++s) {
    Tensor x = ds.sample_tensor(s);
    if (needs_awpg)
      out.prob_inputs.push_back(scaler.apply(awpg->generate_features(x)));
    else if (has_prob)
      out.prob_inputs.push_back(scaler.apply(x));  // A2: the raw series
    out.inputs.push_back(std::move(x));
    out.true_lens.push_back(ds.true_lengths[s]);
    out.labels.push_back(ds.labels[s]);
  }
  return out;
}

double accuracy_on(const WprcnModel& model, const PreparedSamples& data) {
  if (data.inputs.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    const Tensor* prob = data.prob_inputs.empty() ? nullptr : &data.prob_inputs[i];
    if (model.predict(data.inputs[i], prob, data.true_lens[i]) ==
        static_cast<std::size_t>(data.labels[i]))
      ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.inputs.size());
}

struct FitResult {
  double val_accuracy = 0.0;
  std::size_t epochs_run = 0;
};

FitResult fit_classifier(WprcnModel& model, const PreparedSamples& fit,
                         const PreparedSamples& val, const WprcnConfig& config, double lr) {
  ParamRegistry reg;
  model.register_params(reg);
  Adam opt(lr);
  auto order_rng = make_rng(config.seed, 0x02D);
  auto drop_rng = make_rng(config.seed, 0xD20);
  std::vector<std::size_t> order(fit.inputs.size());
  std::iota(order.begin(), order.end(), 0);

  const bool has_val = !val.inputs.empty();
  double best_val = -1.0;
  Snapshot best;
  std::size_t since_best = 0;
  FitResult result;
  const std::size_t bs = std::max<std::size_t>(1, config.batch_size);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t stop = std::min(start + bs, order.size());
      const double inv = 1.0 / static_cast<double>(stop - start);
      reg.zero_grad();
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t s = order[i];
        const Tensor* prob = fit.prob_inputs.empty() ? nullptr : &fit.prob_inputs[s];
        Tensor out = model.logits(fit.inputs[s], prob, fit.true_lens[s], drop_rng, true);
        Tensor loss = scale(cross_entropy_logits(out, static_cast<std::size_t>(fit.labels[s])), inv);
        loss.backward();
      }
      opt.step(reg);
    }
    ++result.epochs_run;
    if (!has_val) continue;  // no early stopping without a validation split
    const double val_acc = accuracy_on(model, val);
    if (val_acc > best_val) {
      best_val = val_acc;
      best = take_snapshot(reg, model.bn_states());
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (has_val && best_val >= 0.0) restore_snapshot(best, reg, model.bn_states());
  result.val_accuracy = has_val ? best_val : accuracy_on(model, fit);
  return result;
}

}  // namespace

TrainedWprcn train_wprcn(const TsDataset& train, const TsDataset& test,
                         const WprcnConfig& config) {
  check(train.size() > 0, "train: empty training split");
  check(train.class_count() >= 2, "train: classification needs at least two classes");
  check(train.normalized, "train: dataset must be normalized first");

  auto [fit_idx, val_idx] = stratified_split(train, config.val_fraction, config.seed);
  TsDataset fit_ds = subset(train, fit_idx);
  TsDataset val_ds = subset(train, val_idx);

  TrainedWprcn out;
  out.config = config;

  // Stage 1: AWPG candidates trained on the designated class, scored on the
  // held-out mix, winner frozen.
  const bool needs_awpg =
      config.ablation == Ablation::kFull || config.ablation == Ablation::kA3;
  if (needs_awpg) {
    std::vector<AwpgModel> candidates;
    for (std::size_t i = 0; i < config.awpg_candidates.size(); ++i) {
      GedConfig ged = config.ged;
      ged.encoder_hidden = config.awpg_candidates[i];
      ged.seed = mix_seed(config.seed, 100 + i);
      candidates.push_back(train_awpg(fit_ds, config.awpg_class, ged));
    }
    // The scoring mix needs the trained class plus at least one other;
    // fall back to the whole training split when the holdout lacks either.
    bool mix_ok = false, seen_trained = false, seen_other = false;
    for (int label : val_ds.labels)
      (label == config.awpg_class ? seen_trained : seen_other) = true;
    mix_ok = seen_trained && seen_other;
    out.awpg_selection = select_config(candidates, mix_ok ? val_ds : train);
    out.awpg = std::move(candidates[out.awpg_selection.best_index]);
  }

  // The probabilistic branch input is standardized per channel with
  // statistics from the fit split (frozen alongside the AWPG).
  if (config.ablation != Ablation::kA1) {
    std::vector<Tensor> raw;
    for (std::size_t s = 0; s < fit_ds.size(); ++s) {
      Tensor x = fit_ds.sample_tensor(s);
      raw.push_back(needs_awpg ? out.awpg->generate_features(x) : x);
    }
    out.scaler.fit(raw);
  }

  PreparedSamples fit_prep = prepare(fit_ds, config, out.awpg, out.scaler);
  PreparedSamples val_prep = prepare(val_ds, config, out.awpg, out.scaler);

  std::vector<double> lrs = config.lr_grid.empty() ? std::vector<double>{config.lr}
                                                   : config.lr_grid;
  double best_val = -1.0;
  for (double lr : lrs) {
    auto init_rng = make_rng(config.seed, 0xC1A55);
    WprcnModel model(train.n, out.awpg ? out.awpg->feature_channels() : 15,
                     train.class_count(), config, init_rng);
    FitResult res = fit_classifier(model, fit_prep, val_prep, config, lr);
    if (res.val_accuracy > best_val) {
      best_val = res.val_accuracy;
      out.classifier = model;
      out.chosen_lr = lr;
      out.val_accuracy = res.val_accuracy;
      out.trained_epochs = res.epochs_run;
    }
  }

  PreparedSamples test_prep = prepare(test, config, out.awpg, out.scaler);
  out.test_accuracy = accuracy_on(out.classifier, test_prep);
  return out;
}

double dataset_accuracy(const TrainedWprcn& model, const TsDataset& ds) {
  PreparedSamples prep = prepare(ds, model.config, model.awpg, model.scaler);
  return accuracy_on(model.classifier, prep);
}

}  // namespace wprcn
