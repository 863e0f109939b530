#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wprcn/tensor.hpp"

namespace wprcn {

// Format error with the offending line number baked into the message.
class TsFormatError : public std::runtime_error {
 public:
  TsFormatError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A labelled collection of multivariate series. Channel-major storage per
// sample (n rows of `length` values after padding); true lengths are kept for
// mask-aware pooling.
struct TsDataset {
  std::string name;
  std::size_t n = 0;       // feature dimensions
  std::size_t length = 0;  // common (padded) length; max true length before padding
  bool equal_length = true;
  std::vector<std::vector<double>> series;  // per sample, n x true_len until padded
  std::vector<std::size_t> true_lengths;
  std::vector<int> labels;  // index into class_names; -1 when unlabelled
  std::vector<std::string> class_names;
  std::vector<std::string> warnings;

  bool normalized = false;
  std::vector<double> feat_min, feat_max;  // per-feature bounds used for normalization

  std::size_t size() const { return series.size(); }
  double value(std::size_t sample, std::size_t dim, std::size_t t) const {
    return series[sample][dim * stride(sample) + t];
  }
  std::size_t stride(std::size_t sample) const {
    return series[sample].size() / (n == 0 ? 1 : n);
  }
  // Sample as an [n x length] tensor (post-padding layout).
  Tensor sample_tensor(std::size_t sample) const;
  int label_index(const std::string& name) const;
  std::size_t class_count() const { return class_names.size(); }
};

TsDataset parse_ts(const std::string& path);
TsDataset parse_ts_text(const std::string& text, const std::string& name = "inline");
void write_ts(const TsDataset& ds, const std::string& path);

// Per-feature min-max bounds taken from a training split.
struct NormStats {
  std::vector<double> feat_min, feat_max;
  std::size_t pad_len = 0;
};

NormStats compute_norm_stats(const TsDataset& train);
// Min-max scale into [0,1] with clamping, then zero-pad the tail to pad_len.
// Constant features map to 0.5 (with a warning on the dataset).
void apply_norm_and_pad(TsDataset& ds, const NormStats& stats);
// Stats from `train` applied to both splits.
void normalize_and_pad(TsDataset& train, TsDataset& test);
void normalize_and_pad(TsDataset& ds);

// Binary dataset cache (magic WPRCNDSET; layout in docs/formats.md). Values
// round-trip bit-exactly, unlike the text format.
void save_dataset_cache(const TsDataset& ds, const std::string& path);
TsDataset load_dataset_cache(const std::string& path);

}  // namespace wprcn
