#include "wprcn/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "wprcn/rng.hpp"

namespace wprcn {

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "sinusoid") return SyntheticKind::kSinusoidMix;
  if (s == "ar") return SyntheticKind::kAutoregressive;
  if (s == "drift") return SyntheticKind::kDriftingMean;
  throw std::invalid_argument("unknown synthetic kind '" + s + "'");
}

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

void gen_sinusoid(const SyntheticSpec& spec, std::size_t cls, std::mt19937_64& rng,
                  std::vector<double>& out) {
  // Two class-specific frequencies per dimension; phases are random per
  // sample so single-timestep marginals carry no class information.
  std::uniform_real_distribution<double> phase(0.0, kTau);
  std::normal_distribution<double> noise(0.0, spec.noise);
  const std::size_t L = spec.length;
  for (std::size_t d = 0; d < spec.n; ++d) {
    const double f1 = 1.5 + 2.0 * static_cast<double>(cls) + 0.5 * static_cast<double>(d);
    const double f2 = 2.0 * f1 + 1.0;
    const double p1 = phase(rng), p2 = phase(rng);
    for (std::size_t t = 0; t < L; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(L);
      out[d * L + t] =
          0.6 * std::sin(kTau * f1 * u + p1) + 0.4 * std::sin(kTau * f2 * u + p2) + noise(rng);
    }
  }
}

void gen_ar(const SyntheticSpec& spec, std::size_t cls, std::mt19937_64& rng,
            std::vector<double>& out) {
  std::normal_distribution<double> noise(0.0, std::max(spec.noise, 1e-3));
  const std::size_t L = spec.length;
  // Stable AR(2) with class-dependent oscillation frequency.
  const double r = 0.95;
  const double theta = 0.3 + 0.5 * static_cast<double>(cls);
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  for (std::size_t d = 0; d < spec.n; ++d) {
    double prev1 = noise(rng), prev2 = noise(rng);
    for (std::size_t t = 0; t < L; ++t) {
      const double v = a1 * prev1 + a2 * prev2 + noise(rng);
      out[d * L + t] = v;
      prev2 = prev1;
      prev1 = v;
    }
  }
}

void gen_drift(const SyntheticSpec& spec, std::size_t cls, std::mt19937_64& rng,
               std::vector<double>& out) {
  std::normal_distribution<double> noise(0.0, spec.noise);
  const std::size_t L = spec.length;
  const std::size_t start = spec.drift_start == 0 ? L / 2 : spec.drift_start;
  const double base = 0.2 + 0.1 * static_cast<double>(cls);
  for (std::size_t d = 0; d < spec.n; ++d) {
    for (std::size_t t = 0; t < L; ++t) {
      double m = base;
      if (t >= start && L > start)
        m += spec.drift_shift * static_cast<double>(t - start) /
             static_cast<double>(L - 1 - start == 0 ? 1 : L - 1 - start);
      out[d * L + t] = m + noise(rng);
    }
  }
}

}  // namespace

TsDataset synthesize(const SyntheticSpec& spec) {
  check(spec.classes >= 1 && spec.n >= 1 && spec.length >= 2 && spec.per_class >= 1,
        "synthesize: bad spec");
  TsDataset ds;
  ds.name = "synthetic";
  ds.n = spec.n;
  ds.length = spec.length;
  ds.equal_length = true;
  for (std::size_t c = 0; c < spec.classes; ++c)
    ds.class_names.push_back(std::to_string(c + 1));

  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      auto rng = make_rng(spec.seed, c * 1000003ull + i);
      std::vector<double> sample(spec.n * spec.length, 0.0);
      switch (spec.kind) {
        case SyntheticKind::kSinusoidMix:
          gen_sinusoid(spec, c, rng, sample);
          break;
        case SyntheticKind::kAutoregressive:
          gen_ar(spec, c, rng, sample);
          break;
        case SyntheticKind::kDriftingMean:
          gen_drift(spec, c, rng, sample);
          break;
      }
      ds.series.push_back(std::move(sample));
      ds.true_lengths.push_back(spec.length);
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  return ds;
}

}  // namespace wprcn
