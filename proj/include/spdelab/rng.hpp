#pragma once

#include <cstdint>
#include <span>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace spdelab {

/// Stream tags so the field and the Brownian path of one sample never share
/// a generator.
enum class StreamTag : std::uint64_t { Field = 1, Noise = 2, Generic = 3 };

/// Standard-normal variates. The zero stream is a test hook that yields
/// exact zeros without consuming randomness.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  static NormalStream zeros() {
    NormalStream s(0);
    s.zero_ = true;
    return s;
  }

  double next() { return zero_ ? 0.0 : dist_(engine_); }

  void fill(std::span<double> out) {
    for (double& v : out) v = next();
  }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
  bool zero_ = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent 64-bit seed from (master seed, index, tag) with
/// SplitMix64 finalisers, so stream `index` can be rebuilt in isolation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 StreamTag tag) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ static_cast<std::uint64_t>(tag));
}

}  // namespace spdelab
