#include "pnet/rng.hpp"

namespace pnet {
namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

void Philox::refill() {
  std::array<std::uint32_t, 4> x = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  block_ = x;
  used_ = 0;
  for (auto& c : counter_) {
    if (++c != 0) break;
  }
}

Philox::result_type Philox::operator()() {
  if (used_ >= 4) refill();
  const std::uint64_t lo = block_[used_];
  const std::uint64_t hi = block_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Philox RngSpec::stream(std::string_view purpose, std::uint64_t index) const {
  return Philox(splitmix64(splitmix64(base_seed ^ fnv1a(purpose)) + index));
}

Philox RngSpec::stream(std::string_view purpose, std::uint64_t index, std::uint64_t sub) const {
  return Philox(splitmix64(splitmix64(splitmix64(base_seed ^ fnv1a(purpose)) + index) + sub));
}

std::uint64_t uniform_index(Philox& g, std::uint64_t bound) {
  if (bound <= 1) return 0;
  u128 m = static_cast<u128>(g()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(g()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace pnet
