#pragma once

// Helpers shared by the unit suites and the acceptance gate.

#include <vector>

#include "mms/rng.hpp"
#include "mms/space.hpp"

namespace mms::testsupport {

// Pointwise calculus inequality suites over seeded random field pairs:
// product rule (with the second-order edge slack lf*lg*h), sublinearity and
// averaged sublinearity (no slack), truncation monotonicity, quantitative
// lower semicontinuity, and the metric/measure rescale comparison. Returns
// the number of pointwise failures (0 expected) and the worst slacks seen.
struct IdentitySuite {
  int failures = 0;
  double worst_product_slack = 0.0;  // lip(fg) - rhs, <= 0 expected up to fp
  double worst_rescale_slack = 0.0;  // lip_scaled - L*lip, ~0 expected
};
IdentitySuite identity_suites(const FiniteSpace& space, Rng& rng, int pairs);

// Random neighbor-walk curves for upper-gradient checks.
std::vector<Curve> random_walk_curves(const FiniteSpace& space, Rng& rng, int count,
                                      int max_steps);

}  // namespace mms::testsupport
