#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "stclf/types.hpp"

namespace stclf {

// Deterministic random source.  Raw bits come from mt19937_64; all
// distribution shaping is done by hand because the std::*_distribution
// adapters are implementation-defined and would break reproducibility of
// recorded traces across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // Standard normal via the Marsaglia polar method (pairs cached).
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Uniform direction on the unit sphere in dimension n.
  Vec sphere(int n) {
    Vec d(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) d[i] = gauss();
      norm = d.norm();
    } while (norm < 1e-12);
    return d / norm;
  }

  // Uniform point in the unit ball in dimension n.
  Vec ball(int n) { return sphere(n) * std::pow(u01(), 1.0 / n); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stclf
