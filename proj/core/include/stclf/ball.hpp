#pragma once

#include <optional>

#include "stclf/lyapunov.hpp"
#include "stclf/types.hpp"

namespace stclf {

// Nested radii around the target:
//   r       — the ball containment is certified for
//   r_tilde — entering this ball traps the state in the V_r sublevel set,
//             which itself sits inside the r-ball
//   r_star  — the core ball; inside it the loop coasts on the long dwell
// V_r is the trapping level.
struct BallGeometry {
  double r = 0.0;
  double V_r = 0.0;
  double r_tilde = 0.0;
  double r_star = 0.0;
};

// Derive the nested radii.  r_tilde defaults to the largest radius whose
// alpha2 value stays under the trapping level; a caller-supplied override is
// accepted only when it satisfies that inequality (useful when alpha2 is a
// conservative fit).  r_star defaults to max(r_tilde/2, r_tilde - 4 eps) and
// must leave room for two sensor errors inside r_tilde.
BallGeometry ball_geometry(const LyapunovPackage& lyap, double r, double eps,
                           std::optional<double> r_star = std::nullopt,
                           std::optional<double> r_tilde_override = std::nullopt);

}  // namespace stclf
