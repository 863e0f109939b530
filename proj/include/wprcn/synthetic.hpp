#pragma once

#include <cstdint>

#include "wprcn/ts_io.hpp"

namespace wprcn {

enum class SyntheticKind { kSinusoidMix, kAutoregressive, kDriftingMean };

// Desk-scale stand-ins for archive data. All generation is seeded and
// deterministic.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kSinusoidMix;
  std::size_t classes = 3;
  std::size_t n = 2;
  std::size_t length = 64;
  std::size_t per_class = 20;
  double noise = 0.05;
  std::uint64_t seed = 0;
  // drifting-mean stream parameters
  double drift_shift = 0.5;
  std::size_t drift_start = 0;  // timestep where the mean starts moving; 0 = mid-stream
};

SyntheticKind synthetic_kind_from_string(const std::string& s);

// Class-dependent generators. The sinusoid mix uses class-specific frequency
// pairs with random phases, so per-timestep marginals overlap across classes;
// the autoregressive kind uses class-specific AR(2) coefficients; the
// drifting-mean kind emits a non-stationary stream whose mean moves by
// drift_shift over the second half (or from drift_start).
TsDataset synthesize(const SyntheticSpec& spec);

}  // namespace wprcn
