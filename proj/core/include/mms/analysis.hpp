#pragma once

#include <string>
#include <vector>

#include "mms/space.hpp"

namespace mms {

struct DoublingWitness {
  int center = -1;
  double radius = 0.0;
};

struct DoublingReport {
  std::vector<double> radii;
  double measure_constant = 1.0;  // D: sup ball_measure(x,2r)/ball_measure(x,r)
  double metric_constant = 1.0;   // C: sup greedy r/2-cover size of B(x,r) (upper bound)
  DoublingWitness measure_witness;
  DoublingWitness metric_witness;
  std::vector<std::string> warnings;  // radii outside (h, diameter]
};

// Geometric grid of `count` radii from 4h to diameter/2 (below 4h
// discreteness dominates the ratios).
std::vector<double> default_radii(const FiniteSpace& space, int count = 8);

// D = max over centers x and given radii r of mu(B(x,2r))/mu(B(x,r)).
DoublingReport measure_doubling(const FiniteSpace& space, const std::vector<double>& radii);

// C = max over (x, r) of the size of a greedy cover of ball(x,r) by balls of
// radius r/2 centered at its points (smallest uncovered index picked first).
// Greedy covers upper-bound the minimal cover, which preserves the direction
// of the C <= D^4 comparison.
DoublingReport metric_doubling(const FiniteSpace& space, const std::vector<double>& radii);

// Both constants over one grid.
DoublingReport doubling_report(const FiniteSpace& space, const std::vector<double>& radii);

struct RemarkCheck {
  bool ok = false;
  double slack = 0.0;  // D^4 - C
  DoublingReport report;
};

// Verifies the metric-doubling bound C <= D^4 implied by measure doubling.
RemarkCheck verify_doubling_remark(const FiniteSpace& space, const std::vector<double>& radii);

struct PoincareReport {
  int center = 0;
  double radius = 0.0;
  double lambda = 1.0;
  // max over u of [mean_B |u - u_B|^2 dmu] / [rad^2 * int_{lambda B} lip(u)^2 dmu],
  // the (2,2) constant with the raw (unaveraged) right-hand side.
  double c_p = 0.0;
  // quotient of the quadratic surrogate that replaces lip^2 by the average of
  // incident-edge quotients (the operator the iteration actually solves)
  double c_p_surrogate = 0.0;
  std::vector<double> extremal;  // on the full space; zero off the active set
  int iterations = 0;
};

// Rayleigh-quotient maximization over fields supported on lambda*B and its
// graph neighbors: deflated inverse iteration on the quadratic surrogate
// pencil, then c_p evaluated with the true max-edge lip at the converged
// extremal. Dense Cholesky backs the solves (active set capped at 2000
// points). Throws Error(no_convergence) past max_iterations.
PoincareReport poincare_constant(const FiniteSpace& space, int center, double radius,
                                 double lambda = 1.0, int max_iterations = 500,
                                 double tol = 1e-13);

struct PoincareCheck {
  bool ok = false;
  double residual = 0.0;  // lhs - c_p * rhs
  double lhs = 0.0;       // mean_B |u - u_B|^2
  double rhs = 0.0;       // rad^2 * int_{lambda B} g^2
};

// Evaluates both sides of the (2,2) inequality for a given pair (u, g).
PoincareCheck poincare_check(const FiniteSpace& space, const std::vector<double>& u,
                             const std::vector<double>& g, int center, double radius,
                             double lambda, double c_p);

}  // namespace mms
