#include "stclf/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace stclf {

ClassK ClassK::quadratic(double coeff) {
  ClassK k;
  k.kind_ = Kind::Quadratic;
  k.coeff_ = coeff;
  return k;
}

ClassK ClassK::table(std::vector<double> s, std::vector<double> v) {
  ClassK k;
  k.kind_ = Kind::Table;
  k.s_ = std::move(s);
  k.v_ = std::move(v);
  if (k.s_.size() != k.v_.size() || k.s_.size() < 2) {
    throw GeometryInfeasibleError("class-K table needs at least two knots");
  }
  for (std::size_t i = 1; i < k.s_.size(); ++i) {
    if (!(k.s_[i] > k.s_[i - 1]) || !(k.v_[i] >= k.v_[i - 1])) {
      throw GeometryInfeasibleError("class-K table must be monotone");
    }
  }
  return k;
}

double ClassK::value(double s) const {
  if (kind_ == Kind::Quadratic) return coeff_ * s * s;
  if (s <= s_.front()) return v_.front() * (s / std::max(s_.front(), 1e-300));
  if (s >= s_.back()) {
    throw GeometryInfeasibleError("class-K table queried beyond its fitted range");
  }
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - s_.begin());
  const double t = (s - s_[i - 1]) / (s_[i] - s_[i - 1]);
  return v_[i - 1] + t * (v_[i] - v_[i - 1]);
}

double ClassK::inverse(double v) const {
  if (v < 0.0) throw GeometryInfeasibleError("class-K inverse of a negative value");
  if (kind_ == Kind::Quadratic) return std::sqrt(v / coeff_);
  if (v <= v_.front()) {
    return s_.front() * (v / std::max(v_.front(), 1e-300));
  }
  if (v > v_.back()) {
    throw GeometryInfeasibleError("class-K inverse queried beyond the fitted range");
  }
  const auto it = std::lower_bound(v_.begin(), v_.end(), v);
  std::size_t i = static_cast<std::size_t>(it - v_.begin());
  if (i == 0) i = 1;
  const double dv = v_[i] - v_[i - 1];
  if (dv <= 0.0) return s_[i - 1];
  const double t = (v - v_[i - 1]) / dv;
  return s_[i - 1] + t * (s_[i] - s_[i - 1]);
}

}  // namespace stclf
