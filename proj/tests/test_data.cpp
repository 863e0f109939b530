#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "wprcn/synthetic.hpp"
#include "wprcn/ts_io.hpp"

using namespace wprcn;

namespace {
std::string fixture(const std::string& name) {
  return std::string(WPRCN_FIXTURE_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("basic fixture parses") {
  TsDataset ds = parse_ts(fixture("good_basic.ts"));
  CHECK(ds.name == "basic");
  CHECK(ds.n == 2);
  CHECK(ds.length == 3);
  CHECK(ds.size() == 2);
  CHECK(ds.class_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.labels[0] == 0);
  CHECK(ds.labels[1] == 1);
  CHECK(ds.value(0, 0, 2) == doctest::Approx(3.0));
  CHECK(ds.value(0, 1, 0) == doctest::Approx(4.0));
  CHECK(ds.value(1, 1, 2) == doctest::Approx(4.5));
}

TEST_CASE("unequal lengths are retained") {
  TsDataset ds = parse_ts(fixture("good_unequal.ts"));
  CHECK_FALSE(ds.equal_length);
  CHECK(ds.true_lengths == std::vector<std::size_t>{4, 2, 3});
  CHECK(ds.length == 4);
}

TEST_CASE("unknown directives warn but parse") {
  TsDataset ds = parse_ts(fixture("good_unknown_directive.ts"));
  CHECK(ds.size() == 2);
  REQUIRE(ds.warnings.size() == 1);
  CHECK(ds.warnings[0].find("@somethingnew") != std::string::npos);
}

TEST_CASE("malformed fixtures are rejected with line numbers") {
  struct Case {
    const char* file;
    const char* needle;
  };
  const Case cases[] = {
      {"bad_missing_data.ts", "@data"},
      {"bad_label.ts", "outside declared set"},
      {"bad_numeric.ts", "non-numeric"},
      {"bad_dims.ts", "dimensions"},
      {"bad_ragged.ts", "values"},
      {"bad_unequal_claim.ts", "unequal"},
  };
  for (const auto& c : cases) {
    bool threw = false;
    try {
      parse_ts(fixture(c.file));
    } catch (const TsFormatError& e) {
      threw = true;
      CHECK(std::string(e.what()).find("line ") != std::string::npos);
      CHECK(std::string(e.what()).find(c.needle) != std::string::npos);
      CHECK(e.line() >= 1);
    }
    CHECK(threw);
  }
}

TEST_CASE("write-then-parse round trip is value identical") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kAutoregressive;
  spec.classes = 3;
  spec.n = 2;
  spec.length = 20;
  spec.per_class = 4;
  spec.seed = 9;
  TsDataset ds = synthesize(spec);
  const std::string path = std::filesystem::temp_directory_path() / "wprcn_roundtrip.ts";
  write_ts(ds, path);
  TsDataset back = parse_ts(path);
  REQUIRE(back.size() == ds.size());
  REQUIRE(back.n == ds.n);
  for (std::size_t s = 0; s < ds.size(); ++s) {
    CHECK(back.labels[s] == ds.labels[s]);
    REQUIRE(back.series[s].size() == ds.series[s].size());
    for (std::size_t i = 0; i < ds.series[s].size(); ++i)
      CHECK(back.series[s][i] == ds.series[s][i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("normalization examples") {
  TsDataset ds = parse_ts_text(
      "@classLabel true a b\n@data\n-1,0,1:5,5,5:a\n-0.5,0.5,1:5,5,5:b\n");
  normalize_and_pad(ds);
  // feature 1 has range [-1, 1]: value 0 maps to 0.5
  CHECK(ds.value(0, 0, 1) == doctest::Approx(0.5));
  CHECK(ds.value(0, 0, 0) == doctest::Approx(0.0));
  CHECK(ds.value(0, 0, 2) == doctest::Approx(1.0));
  // constant feature maps to 0.5 with a warning
  CHECK(ds.value(0, 1, 0) == doctest::Approx(0.5));
  bool warned = false;
  for (const auto& w : ds.warnings)
    if (w.find("constant") != std::string::npos) warned = true;
  CHECK(warned);
}

TEST_CASE("test values beyond training bounds clamp; padding is flagged") {
  TsDataset train = parse_ts_text("@classLabel true a\n@data\n0,1,2,3:a\n");
  TsDataset test = parse_ts_text("@equalLength false\n@classLabel true a\n@data\n-4,9:a\n");
  normalize_and_pad(train, test);
  CHECK(test.value(0, 0, 0) == doctest::Approx(0.0));  // clamped low
  CHECK(test.value(0, 0, 1) == doctest::Approx(1.0));  // clamped high
  CHECK(test.length == 4);
  CHECK(test.true_lengths[0] == 2);
  CHECK(test.value(0, 0, 2) == 0.0);  // padded region exactly zero
  CHECK(test.value(0, 0, 3) == 0.0);
}

TEST_CASE("normalization is idempotent") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kSinusoidMix;
  spec.per_class = 3;
  spec.length = 16;
  spec.seed = 4;
  TsDataset ds = synthesize(spec);
  normalize_and_pad(ds);
  TsDataset once = ds;
  normalize_and_pad(ds);
  REQUIRE(ds.size() == once.size());
  CHECK(ds.true_lengths == once.true_lengths);
  for (std::size_t s = 0; s < ds.size(); ++s)
    for (std::size_t i = 0; i < ds.series[s].size(); ++i)
      CHECK(ds.series[s][i] == once.series[s][i]);
}

TEST_CASE("no leakage: bounds come from the training split only") {
  TsDataset train = parse_ts_text("@classLabel true a\n@data\n0,1,2:a\n");
  TsDataset test = parse_ts_text("@classLabel true a\n@data\n10,20,30:a\n");
  NormStats train_stats = compute_norm_stats(train);
  NormStats test_stats = compute_norm_stats(test);
  CHECK(train_stats.feat_max[0] != test_stats.feat_max[0]);
  normalize_and_pad(train, test);
  CHECK(train.feat_max[0] == doctest::Approx(2.0));
  CHECK(test.feat_max[0] == doctest::Approx(2.0));  // applied, not recomputed
  for (std::size_t t = 0; t < 3; ++t) CHECK(test.value(0, 0, t) == doctest::Approx(1.0));
}

TEST_CASE("dataset cache round trip is bit exact") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kAutoregressive;
  spec.per_class = 3;
  spec.length = 10;
  spec.seed = 21;
  TsDataset ds = synthesize(spec);
  normalize_and_pad(ds);
  const std::string path =
      (std::filesystem::temp_directory_path() / "wprcn_cache.bin").string();
  save_dataset_cache(ds, path);
  TsDataset back = load_dataset_cache(path);
  std::remove(path.c_str());
  CHECK(back.name == ds.name);
  CHECK(back.n == ds.n);
  CHECK(back.length == ds.length);
  CHECK(back.normalized == ds.normalized);
  CHECK(back.class_names == ds.class_names);
  CHECK(back.labels == ds.labels);
  CHECK(back.true_lengths == ds.true_lengths);
  CHECK(back.feat_min == ds.feat_min);
  REQUIRE(back.size() == ds.size());
  for (std::size_t s = 0; s < ds.size(); ++s) CHECK(back.series[s] == ds.series[s]);
}

TEST_CASE("synthesis is deterministic per seed") {
  SyntheticSpec spec;
  spec.seed = 123;
  spec.per_class = 2;
  spec.length = 12;
  TsDataset a = synthesize(spec);
  TsDataset b = synthesize(spec);
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t i = 0; i < a.series[s].size(); ++i)
      CHECK(a.series[s][i] == b.series[s][i]);
  spec.seed = 124;
  TsDataset c = synthesize(spec);
  CHECK(a.series[0][0] != c.series[0][0]);
}

TEST_CASE("drift generator moves the windowed mean by the configured shift") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::kDriftingMean;
  spec.classes = 1;
  spec.n = 1;
  spec.length = 2000;
  spec.per_class = 1;
  spec.noise = 0.02;
  spec.drift_shift = 0.5;
  spec.seed = 31;
  TsDataset ds = synthesize(spec);
  const std::size_t w = 100;
  double head = 0.0, tail = 0.0;
  for (std::size_t t = 0; t < w; ++t) {
    head += ds.value(0, 0, t);
    tail += ds.value(0, 0, spec.length - 1 - t);
  }
  head /= w;
  tail /= w;
  CHECK(tail - head == doctest::Approx(spec.drift_shift).epsilon(0.15));
}
