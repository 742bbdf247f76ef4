#pragma once

#include <cstdint>
#include <initializer_list>

#include "mdcc/channel.hpp"

namespace mdcc::detail {

// Counter-derived substreams: every parallel work item owns an Rng obtained
// by hashing (seed, ids...), so results do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = seed;
    for (std::uint64_t id : ids) s = mix(s ^ (id + 0x9e3779b97f4a7c15ULL));
    return Rng(mix(s));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1) (never exactly 0, safe under log).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) {
    // 128-bit multiply keeps the modulo bias at 2^-64, irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Flat Dirichlet sample via exponential spacings.
inline Vector dirichlet(Rng& rng, Index k) {
  Vector v(k);
  double sum = 0.0;
  for (Index i = 0; i < k; ++i) {
    v[i] = -std::log(rng.uniform_open());
    sum += v[i];
  }
  return v / sum;
}

/// Index sampled from a probability vector by inverse CDF.
inline Index sample_index(Rng& rng, const Vector& p) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Index i = 0; i + 1 < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

}  // namespace mdcc::detail
