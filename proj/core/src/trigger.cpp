#include "stclf/trigger.hpp"

#include <limits>
#include <sstream>

namespace stclf {

double delta_k(const BoundsContext& ctx, const BallGeometry& geom, double eps,
               double eps_bar_value, bool in_core) {
  if (in_core) {
    const double slack = geom.r_tilde - 2.0 * eps - geom.r_star;
    if (slack <= 0.0) {
      throw NonPositiveDwellError("no slack between the core and inner radii");
    }
    if (ctx.Fbar0 <= 0.0) return std::numeric_limits<double>::infinity();
    return slack / ctx.Fbar0;
  }
  const double slack = eps_bar_value - 2.0 * eps;
  if (slack <= 0.0) {
    std::ostringstream os;
    os << "admissible error " << eps_bar_value << " does not exceed twice the sensor accuracy "
       << eps;
    throw NonPositiveDwellError(os.str());
  }
  if (ctx.Fbar <= 0.0) return std::numeric_limits<double>::infinity();
  return slack / ctx.Fbar;
}

double displacement_bound(double F, double dt) { return F * dt; }

}  // namespace stclf
