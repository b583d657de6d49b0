#pragma once

#include <vector>

#include "mms/space.hpp"

namespace mms {

// Scalar fields are plain vectors indexed by point; helpers validate sizes.

// L2 norm against the point measure: sqrt(sum mu f^2).
double l2_norm(const FiniteSpace& space, const std::vector<double>& f);
// Measure-weighted mean and L2 distance between fields.
double mean(const FiniteSpace& space, const std::vector<double>& f);
double l2_distance(const FiniteSpace& space, const std::vector<double>& f,
                   const std::vector<double>& g);
double linf_norm(const std::vector<double>& f);

// Pointwise local Lipschitz constant: max over graph neighbors y of
// |f(x) - f(y)| / edge length. Zero at isolated points.
std::vector<double> local_lip(const FiniteSpace& space, const std::vector<double>& f);

// Global Lipschitz constant. On a connected graph the pairwise supremum
// equals the max of local_lip: every pair is joined by a geodesic edge path,
// so telescoping bounds the pair quotient by the worst edge quotient, and
// edge quotients are themselves pair quotients (edges are metrically tight
// or dominated). Computed as max(local_lip).
double global_lip(const FiniteSpace& space, const std::vector<double>& f);

// sqrt(||f||_L2^2 + ||g||_L2^2), the first-order Sobolev norm with g the
// chosen gradient proxy (default local_lip(f)).
double sobolev_norm(const FiniteSpace& space, const std::vector<double>& f,
                    const std::vector<double>& g);
double sobolev_norm(const FiniteSpace& space, const std::vector<double>& f);

// clamp to [-bound, bound]; local_lip never increases under truncation.
std::vector<double> truncate(const std::vector<double>& f, double bound);

// A field with a nonnegative candidate upper gradient.
struct GradientPair {
  std::vector<double> f;
  std::vector<double> g;

  static GradientPair make(const FiniteSpace& space, std::vector<double> f,
                           std::vector<double> g);
};

// Finitely many curves with uniform weight 1/N each: the finite surrogate of
// a test plan. The compression constant reports max over points of
// (visit count / N) / measure.
struct CurveFamily {
  std::vector<Curve> curves;

  static CurveFamily make(const FiniteSpace& space, std::vector<Curve> curves);
  double compression(const FiniteSpace& space) const;
};

struct UpperGradientReport {
  double lhs = 0.0;  // (1/N) sum |f(end) - f(start)|
  double rhs = 0.0;  // (1/N) sum of curve integrals of g
  std::vector<int> violating_curves;  // per-curve inequality failures
  std::vector<double> slacks;         // lhs_c - rhs_c for those curves
  bool family_ok = false;             // lhs <= rhs + tol
  bool per_curve_ok = false;
};

// Checks |f(gamma_1) - f(gamma_0)| <= integral of g along gamma, per curve and
// family-averaged. Curve integrals use the trapezoid rule on vertex values:
// sum over segments of (g(a)+g(b))/2 * d(a,b).
UpperGradientReport upper_gradient_violations(const FiniteSpace& space,
                                              const GradientPair& pair,
                                              const CurveFamily& family,
                                              double tol = 1e-12);

// Curve integral of g (trapezoid on vertices), used by the report above.
double curve_integral(const FiniteSpace& space, const std::vector<double>& g,
                      const Curve& c);

// Boundary points: degree strictly below the space's max degree (endpoints of
// an interval; empty on a circle). interior_mask additionally drops points
// within `hops` graph hops of the boundary, where one-sided difference
// quotients bias lip estimates.
std::vector<char> boundary_points(const FiniteSpace& space);
std::vector<char> interior_mask(const FiniteSpace& space, int hops);

void check_field(const FiniteSpace& space, const std::vector<double>& f,
                 const char* what);

}  // namespace mms
