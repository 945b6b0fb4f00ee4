#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sigq {

// splitmix64, used to derive independent sub-stream seeds from one master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic RNG. mt19937_64 is bit-exact across platforms by the standard;
// the distributions below are implemented here because std:: distributions
// are not portable across standard libraries.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    auto n = static_cast<uint64_t>(hi - lo + 1);
    auto k = static_cast<uint64_t>(uniform() * static_cast<double>(n));
    if (k >= n) k = n - 1;
    return lo + static_cast<int>(k);
  }

  // Box-Muller; one value per call, no cached spare
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k && !pool.empty(); ++i) {
      int j = uniform_int(0, static_cast<int>(pool.size()) - 1);
      out.push_back(pool[static_cast<size_t>(j)]);
      pool.erase(pool.begin() + j);
    }
    return out;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace sigq
