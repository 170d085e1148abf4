#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace vers {

// One SplitMix64 step. Used only to spread a root seed into well-separated
// sub-stream seeds; the actual generator is mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for a named sub-stream, e.g. derive_seed(root, {trial, worker}).
// Every consumer of randomness gets its own stream keyed by stable indices,
// so results do not depend on scheduling or worker-thread count.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = root;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t part : path) {
    state = out ^ (part + 0x9e3779b97f4a7c15ULL);
    out = splitmix64(state);
  }
  return out;
}

// mt19937_64 is bit-exact across platforms; the <random> distributions are
// not, so uniform draws below are hand-rolled rejection sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, bound), unbiased.
  std::uint64_t uniform_below(std::uint64_t bound) {
    assert(bound > 0);
    std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform on [lo, hi] inclusive.
  std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) {
    assert(lo <= hi);
    return lo + uniform_below(hi - lo + 1);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vers
