#include "wprcn/experiment.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wprcn {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, std::size_t line) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) fail(line, "expected a number, got '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

std::size_t to_size(const std::string& v, std::size_t line) {
  const double d = to_double(v, line);
  if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d)))
    fail(line, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(d);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Experiment parse_experiment_text(const std::string& text, const std::string& name) {
  Experiment exp;
  exp.name = name;
  exp.digest = fnv1a_digest(text);

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");

    if (key == "name") {
      exp.name = value;
    } else if (key == "data.train") {
      exp.train_path = value;
    } else if (key == "data.test") {
      exp.test_path = value;
    } else if (key == "synth.kind") {
      exp.use_synth = true;
      try {
        exp.synth.kind = synthetic_kind_from_string(value);
      } catch (const std::exception& e) {
        fail(line_no, e.what());
      }
    } else if (key == "synth.classes") {
      exp.synth.classes = to_size(value, line_no);
    } else if (key == "synth.dims") {
      exp.synth.n = to_size(value, line_no);
    } else if (key == "synth.length") {
      exp.synth.length = to_size(value, line_no);
    } else if (key == "synth.train_per_class") {
      exp.synth.per_class = to_size(value, line_no);
    } else if (key == "synth.test_per_class") {
      exp.synth_test_per_class = to_size(value, line_no);
    } else if (key == "synth.noise") {
      exp.synth.noise = to_double(value, line_no);
    } else if (key == "synth.drift_shift") {
      exp.synth.drift_shift = to_double(value, line_no);
    } else if (key == "model.ablation") {
      try {
        exp.model.ablation = ablation_from_string(value);
      } catch (const std::exception& e) {
        fail(line_no, e.what());
      }
    } else if (key == "model.lstm_hidden") {
      exp.model.lstm_hidden = to_size(value, line_no);
    } else if (key == "model.lstm_dropout") {
      exp.model.lstm_dropout = to_double(value, line_no);
    } else if (key == "model.fusion_width") {
      exp.model.fusion_width = to_size(value, line_no);
    } else if (key == "cfcn.reduction") {
      exp.model.cfcn.se_reduction = to_size(value, line_no);
    } else if (key == "aptcn.kernel") {
      exp.model.aptcn.tcn_kernel = to_size(value, line_no);
    } else if (key == "aptcn.depth") {
      exp.model.aptcn.depth = to_size(value, line_no);
    } else if (key == "aptcn.channels") {
      exp.model.aptcn.level_channels = to_size(value, line_no);
    } else if (key == "aptcn.eca_kernel") {
      exp.model.aptcn.eca_kernel = to_size(value, line_no);
    } else if (key == "aptcn.dropout") {
      exp.model.aptcn.dropout = to_double(value, line_no);
    } else if (key == "awpg.lambda") {
      exp.model.ged.lambda = to_double(value, line_no);
    } else if (key == "awpg.candidates") {
      exp.model.awpg_candidates.clear();
      for (const auto& tok : split_list(value))
        exp.model.awpg_candidates.push_back(to_size(tok, line_no));
      if (exp.model.awpg_candidates.empty()) fail(line_no, "empty candidate list");
    } else if (key == "awpg.epochs") {
      exp.model.ged.epochs = to_size(value, line_no);
    } else if (key == "awpg.lr") {
      exp.model.ged.lr = to_double(value, line_no);
    } else if (key == "awpg.batch") {
      exp.model.ged.batch_size = to_size(value, line_no);
    } else if (key == "awpg.latent_m") {
      exp.model.ged.latent_m = static_cast<int>(to_size(value, line_no));
    } else if (key == "awpg.latent_j0") {
      exp.model.ged.latent_j0 = static_cast<int>(to_size(value, line_no));
    } else if (key == "awpg.class") {
      const std::size_t c = to_size(value, line_no);
      if (c == 0) fail(line_no, "awpg.class is 1-based");
      exp.model.awpg_class = static_cast<int>(c - 1);
    } else if (key == "train.epochs") {
      exp.model.epochs = to_size(value, line_no);
    } else if (key == "train.patience") {
      exp.model.patience = to_size(value, line_no);
    } else if (key == "train.lr") {
      exp.model.lr = to_double(value, line_no);
    } else if (key == "train.lr_grid") {
      exp.model.lr_grid.clear();
      for (const auto& tok : split_list(value))
        exp.model.lr_grid.push_back(to_double(tok, line_no));
    } else if (key == "train.batch") {
      exp.model.batch_size = to_size(value, line_no);
    } else if (key == "train.val_fraction") {
      exp.model.val_fraction = to_double(value, line_no);
    } else if (key == "seed") {
      exp.model.seed = to_size(value, line_no);
      exp.synth.seed = exp.model.seed;
      exp.model.ged.seed = exp.model.seed;
    } else if (key == "seeds") {
      exp.seeds = to_size(value, line_no);
      if (exp.seeds == 0) fail(line_no, "seeds must be >= 1");
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (!exp.use_synth && exp.train_path.empty())
    throw ConfigError("experiment names neither data.train nor synth.kind");
  try {
    exp.model.aptcn.validate_grid();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("aptcn configuration: ") + e.what());
  }
  return exp;
}

Experiment load_experiment(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open experiment file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment_text(ss.str(), path);
}

std::pair<TsDataset, TsDataset> load_experiment_data(const Experiment& exp) {
  TsDataset train, test;
  if (exp.use_synth) {
    SyntheticSpec train_spec = exp.synth;
    SyntheticSpec test_spec = exp.synth;
    test_spec.per_class = exp.synth_test_per_class;
    test_spec.seed = exp.synth.seed + 0x7E57;
    train = synthesize(train_spec);
    test = synthesize(test_spec);
  } else {
    train = parse_ts(exp.train_path);
    if (!exp.test_path.empty()) test = parse_ts(exp.test_path);
  }
  if (test.size() > 0)
    normalize_and_pad(train, test);
  else
    normalize_and_pad(train);
  return {train, test};
}

}  // namespace wprcn
