#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace galet {

// splitmix64 with Box-Muller gaussians. Chosen over std::mt19937 +
// <random> distributions because distribution output is not specified by the
// standard and differs across standard libraries; this generator is ~20 lines
// and reproducible from any language. Reference outputs for seed 42:
//   next(): 0xbdd732262feb6e95, 0x28efe333b266f103, 0x47526757130f9f52
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1), 53 bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  int uniform_int(int n) {
    int v = static_cast<int>(uniform() * n);
    return v < n ? v : n - 1;
  }

  // standard normal via Box-Muller; u1 is shifted into (0, 1] so log(u1) is finite
  double gaussian() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = two_pi * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

}  // namespace galet
