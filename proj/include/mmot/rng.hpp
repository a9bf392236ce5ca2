#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mmot {

std::uint64_t splitmix64(std::uint64_t x);

// Seed for trial t and tuple/stream u:  master XOR splitmix64(t * 2^32 + u).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t stream);

// mt19937_64 with its own conversions to floats and bounded integers, so a
// seed yields the same stream with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();                        // [0, 1), 53 random bits
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t n);      // uniform on [0, n), n > 0
  bool bernoulli(double p) { return uniform01() < p; }
  double normal();                           // Box-Muller, no cached pair

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mmot
