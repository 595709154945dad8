#pragma once

#include <functional>
#include <vector>

#include "stclf/types.hpp"

namespace stclf {

// Monotone class-K function on [0, s_max], either an exact quadratic
// v = coeff * s^2 or a tabulated monotone interpolant fitted numerically.
// Both forms are invertible on their range.
class ClassK {
 public:
  static ClassK quadratic(double coeff);
  static ClassK table(std::vector<double> s, std::vector<double> v);

  double value(double s) const;
  double inverse(double v) const;  // throws GeometryInfeasibleError out of range
  bool fitted() const { return kind_ == Kind::Table; }

 private:
  enum class Kind { Quadratic, Table } kind_ = Kind::Quadratic;
  double coeff_ = 1.0;
  std::vector<double> s_, v_;
};

// A control Lyapunov function with its decay rates and class-K envelope:
//   alpha1(|x - x*|) <= V(x) <= alpha2(|x - x*|),
// V decreasing at rate w under some admissible feedback, and wt <= w the
// relaxed rate actually certified around noisy measurements.
struct LyapunovPackage {
  std::function<double(const Vec&)> V;
  std::function<Vec(const Vec&)> gradV;
  std::function<double(const Vec&)> w;
  std::function<double(const Vec&)> wt;
  ClassK alpha1;
  ClassK alpha2;
  Vec xstar;

  double dist(const Vec& x) const { return (x - xstar).norm(); }
};

// Known-stabilizing feedback used only for up-front hypothesis checks.
struct StabilizingFeedback {
  std::function<Vec(const Vec&)> kappa;
};

}  // namespace stclf
