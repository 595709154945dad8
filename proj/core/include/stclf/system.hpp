#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "stclf/types.hpp"

namespace stclf {

// Box input constraints u_min <= u <= u_max, required to contain u = 0.
struct InputBox {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  void validate() const {
    for (int i = 0; i < dim(); ++i) {
      if (!(lo[i] <= 0.0 && 0.0 <= hi[i])) {
        throw ConfigError("input box must contain u = 0 in every coordinate");
      }
      if (!(lo[i] < hi[i])) {
        throw ConfigError("input box is degenerate in coordinate " + std::to_string(i));
      }
    }
  }

  bool contains(const Vec& u, double tol = kFeasTol) const {
    for (int i = 0; i < dim(); ++i) {
      if (u[i] < lo[i] - tol || u[i] > hi[i] + tol) return false;
    }
    return true;
  }

  Vec center() const { return 0.5 * (lo + hi); }

  // Vertex selected by one bit per coordinate (bit set -> upper bound).
  Vec vertex(unsigned mask) const {
    Vec v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = (mask >> i) & 1u ? hi[i] : lo[i];
    return v;
  }

  // Largest input magnitude available in coordinate i.
  double max_magnitude(int i) const { return std::max(std::abs(lo[i]), hi[i]); }
};

// Input-affine dynamics  xdot = f(x) + g(x) u  on an axis-box working set.
struct ControlAffineSystem {
  int n = 0;
  int m = 0;
  std::function<Vec(const Vec&)> f;
  std::function<Mat(const Vec&)> g;  // n x m
  InputBox input_box;
  StateBox domain;

  Vec xdot(const Vec& x, const Vec& u) const {
    Vec v = f(x);
    if (!v.allFinite()) {
      throw EvaluatorError("drift evaluator returned a non-finite value");
    }
    Mat G = g(x);
    if (G.rows() != n || G.cols() != m || !G.allFinite()) {
      throw EvaluatorError("input-map evaluator returned an invalid matrix");
    }
    return v + G * u;
  }
};

}  // namespace stclf
