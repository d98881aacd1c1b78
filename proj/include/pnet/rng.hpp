#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace pnet {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Each (key, counter) pair maps to four independent 32-bit words, so streams
/// can be split by key without any shared state. Produces 64-bit outputs.
class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(std::uint64_t key = 0) : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t key() const { return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0]; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

/// Seeding rule shared by every component: one base seed, streams derived by
/// (purpose tag, replica index). Identical specs give identical streams.
struct RngSpec {
  std::uint64_t base_seed = 0;

  Philox stream(std::string_view purpose, std::uint64_t index = 0) const;
  Philox stream(std::string_view purpose, std::uint64_t index, std::uint64_t sub) const;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);

/// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Philox& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Unbiased uniform integer in [0, bound) (Lemire's multiply-shift with rejection).
std::uint64_t uniform_index(Philox& g, std::uint64_t bound);

}  // namespace pnet
