#pragma once

#include "stclf/types.hpp"

namespace stclf::testing {

inline Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace stclf::testing
