#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>

namespace synthsoc {

// Seeded stream used for every random choice the engine makes. The bit
// generator is std::mt19937_64, whose output sequence is fixed by the
// standard; bounded draws use rejection sampling here rather than
// std::uniform_int_distribution so traces are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [0, 1) with 53 bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[static_cast<std::size_t>(below(i))]);
    }
  }

  // FNV-1a digest of the full generator state.
  std::uint64_t state_hash() const;

 private:
  std::mt19937_64 gen_;
};

// Child seed for an independent stream (agent policies, episodes in a batch).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace synthsoc
