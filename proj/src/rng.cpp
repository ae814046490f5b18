#include "synthsoc/rng.h"

#include <bit>
#include <cstdio>
#include <sstream>

#include "synthsoc/hash.h"

namespace synthsoc {

std::uint64_t Rng::state_hash() const {
  std::ostringstream os;
  os << gen_;
  return fnv1a(os.str());
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over (base, stream).
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void Fnv1a::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace synthsoc
