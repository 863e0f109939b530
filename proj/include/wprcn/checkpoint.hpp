#pragma once

#include <iosfwd>
#include <string>

#include "wprcn/density.hpp"
#include "wprcn/layers.hpp"

namespace wprcn {

// Binary container formats (little-endian; byte layout in docs/formats.md).
//
// Parameter container: magic "WPRCNCKP", u32 version, u32 record count, then
// per record: u32 name length, name bytes, u32 ndim, u64 extents, f64 values
// row-major.
//
// Density block: magic "WPRCNDNS", u32 version, i32 m, i32 j0, u64 n,
// u64 gamma, f64 alphas, u8 harmonic, u64 update_count, u64 point count,
// then the l x gamma weight matrix row-major as f64.

void save_params(std::ostream& out, const ParamRegistry& params);
// Loads by name into the registry's existing tensors; extents must match.
void load_params(std::istream& in, ParamRegistry& params);
void save_params_file(const std::string& path, const ParamRegistry& params);
void load_params_file(const std::string& path, ParamRegistry& params);

void save_density(std::ostream& out, const DensityState& state);
DensityState load_density(std::istream& in);
void save_density_file(const std::string& path, const DensityState& state);
DensityState load_density_file(const std::string& path);

}  // namespace wprcn
