#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace movdet {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123). The
/// key is (seed, 0); the 256-bit counter starts at zero and is incremented
/// before each block, matching numpy.random.Philox. Satisfies
/// UniformRandomBitGenerator.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr std::string_view kAlgorithm = "philox4x64-10";

  explicit Philox4x64(std::uint64_t seed) : key_{seed, 0} {}
  Philox4x64(Key key, Block counter) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// The raw bijection: ten rounds of Philox applied to `counter` under `key`.
  static Block encrypt(Block counter, Key key);

 private:
  Key key_;
  Block counter_{};
  Block buffer_{};
  int position_ = 4;
};

/// Seed of the index-th parallel substream: seed XOR index.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ index;
}

}  // namespace movdet
