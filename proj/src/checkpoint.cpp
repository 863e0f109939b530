#include "wprcn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace wprcn {

namespace {

constexpr char kParamMagic[8] = {'W', 'P', 'R', 'C', 'N', 'C', 'K', 'P'};
constexpr char kDensityMagic[8] = {'W', 'P', 'R', 'C', 'N', 'D', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return v;
}

void put_magic(std::ostream& out, const char (&magic)[8]) { out.write(magic, 8); }

void expect_magic(std::istream& in, const char (&magic)[8], const char* what) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0)
    throw std::runtime_error(std::string("checkpoint: bad ") + what + " header");
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  return s;
}

}  // namespace

void save_params(std::ostream& out, const ParamRegistry& params) {
  put_magic(out, kParamMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.items.size()));
  for (const auto& [name, t] : params.items) {
    put_string(out, name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t d = 0; d < t.ndim(); ++d) put<std::uint64_t>(out, t.dim(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
}

void load_params(std::istream& in, ParamRegistry& params) {
  expect_magic(in, kParamMagic, "parameter container");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  const auto count = get<std::uint32_t>(in);
  if (count != params.items.size())
    throw std::runtime_error("checkpoint: record count mismatch (" + std::to_string(count) +
                             " in file, " + std::to_string(params.items.size()) + " expected)");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = get_string(in);
    if (name != params.items[i].first)
      throw std::runtime_error("checkpoint: record '" + name + "' found where '" +
                               params.items[i].first + "' expected");
    const auto ndim = get<std::uint32_t>(in);
    Shape shape(ndim);
    for (auto& d : shape) d = get<std::uint64_t>(in);
    Tensor& t = params.items[i].second;
    if (shape != t.shape())
      throw std::runtime_error("checkpoint: extent mismatch for '" + name + "'");
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated stream");
  }
}

void save_params_file(const std::string& path, const ParamRegistry& params) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  save_params(f, params);
}

void load_params_file(const std::string& path, ParamRegistry& params) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  load_params(f, params);
}

void save_density(std::ostream& out, const DensityState& state) {
  put_magic(out, kDensityMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, order_m(state.order()));
  put<std::int32_t>(out, state.j0());
  put<std::uint64_t>(out, state.input_dim());
  put<std::uint64_t>(out, state.receptive_fields().size());
  for (double a : state.receptive_fields().alphas) put<double>(out, a);
  put<std::uint8_t>(out, state.harmonic() ? 1 : 0);
  put<std::uint64_t>(out, state.update_count());
  put<std::uint64_t>(out, state.grid().count);
  const auto w = state.weights_dense();
  out.write(reinterpret_cast<const char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
}

DensityState load_density(std::istream& in) {
  expect_magic(in, kDensityMagic, "density block");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  const auto m = get<std::int32_t>(in);
  const auto j0 = get<std::int32_t>(in);
  const auto n = get<std::uint64_t>(in);
  const auto gamma = get<std::uint64_t>(in);
  std::vector<double> alphas(gamma);
  for (auto& a : alphas) a = get<double>(in);
  const bool harmonic = get<std::uint8_t>(in) != 0;
  const auto update_count = get<std::uint64_t>(in);
  const auto points = get<std::uint64_t>(in);
  DensityState state(bspline_order_from_int(m), j0, n, ReceptiveFieldSet(alphas), harmonic);
  if (state.grid().count != points)
    throw std::runtime_error("checkpoint: density grid extent mismatch");
  std::vector<double> w(points * gamma);
  in.read(reinterpret_cast<char*>(w.data()),
          static_cast<std::streamsize>(w.size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated stream");
  state.load_weights(w, update_count);
  return state;
}

void save_density_file(const std::string& path, const DensityState& state) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  save_density(f, state);
}

DensityState load_density_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return load_density(f);
}

}  // namespace wprcn
