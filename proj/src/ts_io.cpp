#include "wprcn/ts_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wprcn {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_bool(const std::string& s) { return lower(trim(s)) == "true"; }

double parse_number(const std::string& tok, std::size_t line, std::size_t dim, std::size_t pos) {
  const std::string t = trim(tok);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw TsFormatError("non-numeric value '" + t + "' (dimension " + std::to_string(dim + 1) +
                            ", position " + std::to_string(pos + 1) + ")",
                        line);
  }
  if (used != t.size())
    throw TsFormatError("non-numeric value '" + t + "' (dimension " + std::to_string(dim + 1) +
                            ", position " + std::to_string(pos + 1) + ")",
                        line);
  return v;
}

}  // namespace

Tensor TsDataset::sample_tensor(std::size_t sample) const {
  const std::size_t stride_len = stride(sample);
  Tensor t({n, length});
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t i = 0; i < std::min(stride_len, length); ++i)
      t(d, i) = series[sample][d * stride_len + i];
  return t;
}

int TsDataset::label_index(const std::string& nm) const {
  for (std::size_t i = 0; i < class_names.size(); ++i)
    if (class_names[i] == nm) return static_cast<int>(i);
  return -1;
}

TsDataset parse_ts_text(const std::string& text, const std::string& name) {
  TsDataset ds;
  ds.name = name;
  bool has_class_label = false;
  bool in_data = false;
  bool saw_data_tag = false;
  long declared_dims = -1;
  long declared_len = -1;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (!in_data && line[0] == '@') {
      const std::size_t sp = line.find_first_of(" \t");
      const std::string tag = lower(sp == std::string::npos ? line : line.substr(0, sp));
      const std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp + 1));
      if (tag == "@problemname") {
        ds.name = rest;
      } else if (tag == "@dimensions") {
        declared_dims = std::strtol(rest.c_str(), nullptr, 10);
      } else if (tag == "@equallength") {
        ds.equal_length = parse_bool(rest);
      } else if (tag == "@serieslength") {
        declared_len = std::strtol(rest.c_str(), nullptr, 10);
      } else if (tag == "@classlabel") {
        auto toks = split(rest, ' ');
        std::vector<std::string> clean;
        for (auto& t : toks)
          if (!trim(t).empty()) clean.push_back(trim(t));
        if (clean.empty()) throw TsFormatError("@classLabel needs true/false", line_no);
        has_class_label = parse_bool(clean[0]);
        for (std::size_t i = 1; i < clean.size(); ++i) ds.class_names.push_back(clean[i]);
        if (has_class_label && ds.class_names.empty())
          throw TsFormatError("@classLabel true requires a label list", line_no);
      } else if (tag == "@univariate" || tag == "@timestamps" || tag == "@missing" ||
                 tag == "@targetlabel") {
        // recognized but unused here
      } else if (tag == "@data") {
        in_data = true;
        saw_data_tag = true;
      } else {
        ds.warnings.push_back("line " + std::to_string(line_no) + ": unsupported directive '" +
                              tag + "' ignored");
      }
      continue;
    }

    if (!in_data)
      throw TsFormatError("data before @data tag (or missing header)", line_no);

    auto fields = split(line, ':');
    std::string label;
    std::size_t dim_count = fields.size();
    if (has_class_label) {
      if (fields.size() < 2) throw TsFormatError("missing class label field", line_no);
      label = trim(fields.back());
      dim_count = fields.size() - 1;
      if (ds.label_index(label) < 0)
        throw TsFormatError("label '" + label + "' outside declared set", line_no);
    }
    if (declared_dims > 0 && dim_count != static_cast<std::size_t>(declared_dims))
      throw TsFormatError("expected " + std::to_string(declared_dims) + " dimensions, found " +
                              std::to_string(dim_count),
                          line_no);
    if (ds.n == 0)
      ds.n = dim_count;
    else if (dim_count != ds.n)
      throw TsFormatError("expected " + std::to_string(ds.n) + " dimensions, found " +
                              std::to_string(dim_count),
                          line_no);

    std::vector<std::vector<double>> dims(dim_count);
    std::size_t len = 0;
    for (std::size_t d = 0; d < dim_count; ++d) {
      auto toks = split(fields[d], ',');
      for (std::size_t p = 0; p < toks.size(); ++p)
        dims[d].push_back(parse_number(toks[p], line_no, d, p));
      if (d == 0)
        len = dims[d].size();
      else if (dims[d].size() != len)
        throw TsFormatError("dimension " + std::to_string(d + 1) + " has " +
                                std::to_string(dims[d].size()) + " values, expected " +
                                std::to_string(len),
                            line_no);
    }
    if (ds.equal_length) {
      if (declared_len > 0 && len != static_cast<std::size_t>(declared_len))
        throw TsFormatError("series length " + std::to_string(len) + " differs from declared " +
                                std::to_string(declared_len),
                            line_no);
      if (!ds.true_lengths.empty() && len != ds.true_lengths.back())
        throw TsFormatError("unequal series length in @equalLength dataset", line_no);
    }

    std::vector<double> flat;
    flat.reserve(dim_count * len);
    for (auto& dvals : dims) flat.insert(flat.end(), dvals.begin(), dvals.end());
    ds.series.push_back(std::move(flat));
    ds.true_lengths.push_back(len);
    ds.labels.push_back(has_class_label ? ds.label_index(label) : -1);
    ds.length = std::max(ds.length, len);
  }

  if (!saw_data_tag) throw TsFormatError("missing @data tag", line_no == 0 ? 1 : line_no);
  return ds;
}

TsDataset parse_ts(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  TsDataset ds = parse_ts_text(ss.str(), path);
  return ds;
}

void write_ts(const TsDataset& ds, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "@problemName " << (ds.name.empty() ? "unnamed" : ds.name) << "\n";
  f << "@timeStamps false\n";
  f << "@univariate " << (ds.n == 1 ? "true" : "false") << "\n";
  f << "@dimensions " << ds.n << "\n";
  f << "@equalLength " << (ds.equal_length ? "true" : "false") << "\n";
  if (ds.equal_length) f << "@seriesLength " << (ds.true_lengths.empty() ? ds.length : ds.true_lengths[0]) << "\n";
  f << "@classLabel true";
  for (const auto& c : ds.class_names) f << " " << c;
  f << "\n@data\n";
  f.precision(17);
  for (std::size_t s = 0; s < ds.size(); ++s) {
    const std::size_t stride = ds.stride(s);
    const std::size_t len = ds.true_lengths[s];
    for (std::size_t d = 0; d < ds.n; ++d) {
      for (std::size_t t = 0; t < len; ++t) {
        if (t) f << ",";
        f << ds.series[s][d * stride + t];
      }
      f << ":";
    }
    f << ds.class_names[ds.labels[s]] << "\n";
  }
}

namespace {

constexpr char kCacheMagic[10] = "WPRCNDSET";  // 9 chars + NUL, 9 written

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("dataset cache: truncated stream");
  return v;
}

void put_str(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("dataset cache: truncated stream");
  return s;
}

}  // namespace

void save_dataset_cache(const TsDataset& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f.write(kCacheMagic, 9);
  put<std::uint32_t>(f, 1);  // version
  put_str(f, ds.name);
  put<std::uint64_t>(f, ds.n);
  put<std::uint64_t>(f, ds.length);
  put<std::uint8_t>(f, ds.equal_length ? 1 : 0);
  put<std::uint8_t>(f, ds.normalized ? 1 : 0);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(ds.class_names.size()));
  for (const auto& c : ds.class_names) put_str(f, c);
  put<std::uint64_t>(f, ds.size());
  for (std::size_t s = 0; s < ds.size(); ++s) {
    put<std::uint64_t>(f, ds.true_lengths[s]);
    put<std::int32_t>(f, ds.labels[s]);
    put<std::uint64_t>(f, ds.series[s].size());
    f.write(reinterpret_cast<const char*>(ds.series[s].data()),
            static_cast<std::streamsize>(ds.series[s].size() * sizeof(double)));
  }
  const std::uint64_t bounds = ds.feat_min.size();
  put<std::uint64_t>(f, bounds);
  f.write(reinterpret_cast<const char*>(ds.feat_min.data()),
          static_cast<std::streamsize>(bounds * sizeof(double)));
  f.write(reinterpret_cast<const char*>(ds.feat_max.data()),
          static_cast<std::streamsize>(bounds * sizeof(double)));
}

TsDataset load_dataset_cache(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  char magic[9];
  f.read(magic, 9);
  if (!f || std::string(magic, 9) != std::string(kCacheMagic, 9))
    throw std::runtime_error("dataset cache: bad header in '" + path + "'");
  if (get<std::uint32_t>(f) != 1) throw std::runtime_error("dataset cache: unsupported version");
  TsDataset ds;
  ds.name = get_str(f);
  ds.n = get<std::uint64_t>(f);
  ds.length = get<std::uint64_t>(f);
  ds.equal_length = get<std::uint8_t>(f) != 0;
  ds.normalized = get<std::uint8_t>(f) != 0;
  const auto classes = get<std::uint32_t>(f);
  for (std::uint32_t i = 0; i < classes; ++i) ds.class_names.push_back(get_str(f));
  const auto count = get<std::uint64_t>(f);
  for (std::uint64_t s = 0; s < count; ++s) {
    ds.true_lengths.push_back(get<std::uint64_t>(f));
    ds.labels.push_back(get<std::int32_t>(f));
    const auto values = get<std::uint64_t>(f);
    std::vector<double> buf(values);
    f.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(values * sizeof(double)));
    if (!f) throw std::runtime_error("dataset cache: truncated stream");
    ds.series.push_back(std::move(buf));
  }
  const auto bounds = get<std::uint64_t>(f);
  ds.feat_min.assign(bounds, 0.0);
  ds.feat_max.assign(bounds, 0.0);
  if (bounds > 0) {
    f.read(reinterpret_cast<char*>(ds.feat_min.data()),
           static_cast<std::streamsize>(bounds * sizeof(double)));
    f.read(reinterpret_cast<char*>(ds.feat_max.data()),
           static_cast<std::streamsize>(bounds * sizeof(double)));
    if (!f) throw std::runtime_error("dataset cache: truncated stream");
  }
  return ds;
}

NormStats compute_norm_stats(const TsDataset& train) {
  check(train.n > 0 && train.size() > 0, "normalize: empty dataset");
  NormStats st;
  st.feat_min.assign(train.n, std::numeric_limits<double>::infinity());
  st.feat_max.assign(train.n, -std::numeric_limits<double>::infinity());
  st.pad_len = 0;
  for (std::size_t s = 0; s < train.size(); ++s) {
    const std::size_t stride = train.stride(s);
    const std::size_t len = train.true_lengths[s];  // padding never enters the stats
    st.pad_len = std::max(st.pad_len, len);
    for (std::size_t d = 0; d < train.n; ++d)
      for (std::size_t t = 0; t < len; ++t) {
        const double v = train.series[s][d * stride + t];
        st.feat_min[d] = std::min(st.feat_min[d], v);
        st.feat_max[d] = std::max(st.feat_max[d], v);
      }
  }
  return st;
}

void apply_norm_and_pad(TsDataset& ds, const NormStats& stats) {
  check(ds.n == stats.feat_min.size(), "normalize: dimension mismatch with stats");
  for (std::size_t d = 0; d < ds.n; ++d)
    if (stats.feat_max[d] == stats.feat_min[d])
      ds.warnings.push_back("feature " + std::to_string(d + 1) +
                            " is constant on the training split; mapped to 0.5");
  for (std::size_t s = 0; s < ds.size(); ++s) {
    const std::size_t stride = ds.stride(s);
    const std::size_t len = ds.true_lengths[s];
    std::size_t keep = std::min(len, stats.pad_len);
    if (len > stats.pad_len)
      ds.warnings.push_back("sample " + std::to_string(s + 1) + " longer than training maximum; truncated");
    std::vector<double> out(ds.n * stats.pad_len, 0.0);
    for (std::size_t d = 0; d < ds.n; ++d) {
      const double lo = stats.feat_min[d], hi = stats.feat_max[d];
      for (std::size_t t = 0; t < keep; ++t) {
        double v = ds.series[s][d * stride + t];
        if (hi == lo)
          v = 0.5;
        else
          v = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
        out[d * stats.pad_len + t] = v;
      }
    }
    ds.series[s] = std::move(out);
    ds.true_lengths[s] = keep;
  }
  ds.length = stats.pad_len;
  ds.feat_min = stats.feat_min;
  ds.feat_max = stats.feat_max;
  ds.normalized = true;
}

void normalize_and_pad(TsDataset& train, TsDataset& test) {
  NormStats st = compute_norm_stats(train);
  apply_norm_and_pad(train, st);
  apply_norm_and_pad(test, st);
}

void normalize_and_pad(TsDataset& ds) {
  NormStats st = compute_norm_stats(ds);
  apply_norm_and_pad(ds, st);
}

}  // namespace wprcn
