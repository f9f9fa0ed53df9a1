#include "ccil/nn/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ccil/common/errors.hpp"

namespace ccil::nn {

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> buf{};
  is.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!is) throw FormatError("unexpected end of file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) { put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

void put_string(std::ostream& os, const std::string& s) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get_le<std::uint32_t>(is);
  if (n > (1u << 20)) throw FormatError("implausible string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw FormatError("unexpected end of file");
  return s;
}

void expect_magic(std::istream& is, const char* magic) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0) throw FormatError(std::string("bad magic, expected ") + magic);
}

}  // namespace

void write_param_vector(std::ostream& os, const ParamVector& p) {
  os.write("CCPV", 4);
  put_le<std::uint32_t>(os, kParamFormatVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.manifest().size()));
  for (const auto& l : p.manifest()) {
    put_string(os, l.name);
    put_le<std::uint64_t>(os, l.rows);
    put_le<std::uint64_t>(os, l.cols);
  }
  put_le<std::uint64_t>(os, p.size());
  for (double v : p.values()) put_f64(os, v);
}

ParamVector read_param_vector(std::istream& is) {
  expect_magic(is, "CCPV");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kParamFormatVersion) throw FormatError("unsupported parameter format version");
  const auto layers = get_le<std::uint32_t>(is);
  std::vector<LayerShape> manifest;
  std::uint64_t total = 0;
  for (std::uint32_t k = 0; k < layers; ++k) {
    LayerShape l;
    l.name = get_string(is);
    l.rows = get_le<std::uint64_t>(is);
    l.cols = get_le<std::uint64_t>(is);
    total += l.rows * l.cols;
    manifest.push_back(std::move(l));
  }
  const auto n = get_le<std::uint64_t>(is);
  if (n != total) throw FormatError("value count does not match manifest");
  std::vector<double> values(n);
  for (auto& v : values) v = get_f64(is);
  return ParamVector(std::move(manifest), std::move(values));
}

void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  os.write("CCCK", 4);
  put_le<std::uint32_t>(os, kParamFormatVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.vectors.size()));
  for (const auto& [name, p] : c.vectors) {
    put_string(os, name);
    write_param_vector(os, p);
  }
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.scalars.size()));
  for (const auto& [name, v] : c.scalars) {
    put_string(os, name);
    put_f64(os, v);
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  expect_magic(is, "CCCK");
  if (get_le<std::uint32_t>(is) != kParamFormatVersion) throw FormatError("unsupported checkpoint version");
  Checkpoint c;
  const auto nv = get_le<std::uint32_t>(is);
  for (std::uint32_t k = 0; k < nv; ++k) {
    std::string name = get_string(is);
    c.vectors.emplace(std::move(name), read_param_vector(is));
  }
  const auto ns = get_le<std::uint32_t>(is);
  for (std::uint32_t k = 0; k < ns; ++k) {
    std::string name = get_string(is);
    c.scalars.emplace(std::move(name), get_f64(is));
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, c);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace ccil::nn
