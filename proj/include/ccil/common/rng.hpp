#pragma once

#include <cstdint>
#include <string_view>

namespace ccil {

/// Named streams derived from one master seed. Algorithms that share a seed
/// share every stream, so comparisons see the same environment randomness.
enum class Stream : std::uint64_t {
  kEnv = 1,
  kPolicyInit = 2,
  kValueInit = 3,
  kDiscriminatorInit = 4,
  kRollout = 5,
  kShuffle = 6,
  kExpertSample = 7,
  kSplit = 8,
};

/// Counter-based splittable generator. Output i of a stream is a pure function
/// of (key, i), so child streams never overlap and replays are exact.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

  Rng split(std::uint64_t stream_id) const {
    Rng child;
    child.key_ = mix(key_ ^ mix(stream_id + 0x9e3779b97f4a7c15ULL));
    return child;
  }
  Rng split(Stream s) const { return split(static_cast<std::uint64_t>(s)); }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// 64-bit FNV-1a, used for content hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace ccil
