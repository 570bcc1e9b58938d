#pragma once

#include <cstdint>
#include <vector>

namespace reascirc {

// splitmix64: stable across platforms and standard libraries, unlike
// std::shuffle / std::uniform_int_distribution. Emitted files advertise the
// generator as sampler_version().
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace reascirc
