#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "ccil/nn/param_vector.hpp"

namespace ccil::nn {

// Binary layout, all integers and reals little-endian:
//
//   ParamVector:  "CCPV" u32 version(=1) u32 n_layers
//                 n_layers x { u32 name_len, name bytes, u64 rows, u64 cols }
//                 u64 n_values, n_values x f64
//
//   Checkpoint:   "CCCK" u32 version(=1)
//                 u32 n_vectors  x { u32 name_len, name, ParamVector }
//                 u32 n_scalars  x { u32 name_len, name, f64 }

inline constexpr std::uint32_t kParamFormatVersion = 1;

void write_param_vector(std::ostream& os, const ParamVector& p);
/// Throws FormatError on a bad magic, unknown version, truncation or a
/// manifest/length mismatch; NonFiniteError on NaN/Inf payloads.
ParamVector read_param_vector(std::istream& is);

struct Checkpoint {
  std::map<std::string, ParamVector> vectors;
  std::map<std::string, double> scalars;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(std::ostream& os, const Checkpoint& c);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ccil::nn
