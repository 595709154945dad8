#include "stclf/ball.hpp"

#include <algorithm>
#include <sstream>

namespace stclf {

BallGeometry ball_geometry(const LyapunovPackage& lyap, double r, double eps,
                           std::optional<double> r_star,
                           std::optional<double> r_tilde_override) {
  if (!(r > 0.0)) throw ConfigError("target radius must be positive");
  if (eps < 0.0) throw ConfigError("sensor accuracy must be nonnegative");

  BallGeometry geom;
  geom.r = r;
  geom.V_r = lyap.alpha1.value(r);

  if (r_tilde_override) {
    const double rt = *r_tilde_override;
    if (!(rt > 0.0)) throw ConfigError("inner radius override must be positive");
    const double a2 = lyap.alpha2.value(rt);
    if (a2 > geom.V_r + 1e-9) {
      std::ostringstream os;
      os << "inner radius override " << rt << " is too large: alpha2(" << rt << ") = " << a2
         << " exceeds the trapping level " << geom.V_r;
      throw GeometryInfeasibleError(os.str());
    }
    geom.r_tilde = rt;
  } else {
    geom.r_tilde = lyap.alpha2.inverse(geom.V_r);
  }
  if (geom.r_tilde > r + 1e-9) {
    std::ostringstream os;
    os << "inner radius " << geom.r_tilde << " exceeds the target radius " << r
       << "; the comparison functions do not sandwich the Lyapunov function";
    throw GeometryInfeasibleError(os.str());
  }

  geom.r_star = r_star ? *r_star : std::max(0.5 * geom.r_tilde, geom.r_tilde - 4.0 * eps);
  if (!(geom.r_star > 0.0)) throw ConfigError("core radius must be positive");
  if (geom.r_star + 2.0 * eps >= geom.r_tilde) {
    std::ostringstream os;
    os << "core radius " << geom.r_star << " plus twice the sensor accuracy " << eps
       << " reaches the inner radius " << geom.r_tilde
       << "; the core dwell time would be non-positive";
    throw NonPositiveDwellError(os.str());
  }
  return geom;
}

}  // namespace stclf
