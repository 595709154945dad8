#pragma once

#include "stclf/ball.hpp"
#include "stclf/bounds.hpp"
#include "stclf/types.hpp"

namespace stclf {

// Self-triggered inter-measurement time.  Outside the core the dwell spends
// the admissible-error slack at the worst-case closed-loop speed; inside the
// core it spends the geometric slack between the core and inner radii at the
// worst-case drift speed.  Throws NonPositiveDwellError when the slack is
// exhausted (the sensor is not accurate enough at this state).
double delta_k(const BoundsContext& ctx, const BallGeometry& geom, double eps,
               double eps_bar_value, bool in_core);

// Upper bound on how far the state can travel in dt seconds at speed bound F.
double displacement_bound(double F, double dt);

}  // namespace stclf
