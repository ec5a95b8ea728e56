#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace pacekit {

// Counter-based generator: the n-th output of a stream is the SplitMix64
// finalizer applied to key + n * gamma, where the key is derived from
// (seed, stream id). Streams with different ids are independent, and any
// stream can be re-created from its two integers alone, which is what makes
// experiment replays exact.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(mix(seed + kGamma) ^ mix(stream * kStreamGamma + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGamma); }

  // Child stream keyed on this stream's key; independent of the parent's
  // position.
  RandomStream split(std::uint64_t stream) const noexcept {
    return RandomStream(key_, stream);
  }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() {
    std::normal_distribution<double> standard(0.0, 1.0);
    return standard(*this);
  }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    return pick(*this);
  }

  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamGamma = 0xd1b54a32d192ed03ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Well-known stream ids. Training data, evaluation traces, budget draws and
// buy-all estimation never share a stream.
namespace streams {
inline constexpr std::uint64_t dataset = 1;
inline constexpr std::uint64_t training = 2;
inline constexpr std::uint64_t evaluation = 3;
inline constexpr std::uint64_t budget = 4;
inline constexpr std::uint64_t buy_all = 5;
}  // namespace streams

}  // namespace pacekit
