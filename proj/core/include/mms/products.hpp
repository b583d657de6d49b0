#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mms/space.hpp"

namespace mms {

// Warp fields on the Y factor. Both are nonnegative; every zero of w_d must
// also be a zero of w_m. The modulus records max over Y-edges of the larger
// difference quotient of the two fields (a Lipschitz modulus used to bound
// the endpoint-averaging deviation in edge lengths).
struct WarpSpec {
  std::vector<double> wd;
  std::vector<double> wm;
  double modulus = 0.0;

  static WarpSpec make(const FiniteSpace& y, std::vector<double> wd,
                       std::vector<double> wm);
};

struct WarpedOptions {
  // Long-range edge families (x-hops, y-hops) appended to the three base
  // families (Y-edges, X-edges, unit diagonals). Unit diagonals alone bias
  // long skew geodesics upward by several percent; these dyadic offsets give
  // chordal accuracy. Empty list = base families only.
  std::vector<std::pair<int, int>> skew_offsets = {{2, 1}, {1, 2}, {1, 4}, {1, 8}, {1, 16}};
};

// Cartesian or warped product of two finite spaces.
//
// Node indexing: pair id = x * |Y| + y. Cartesian nodes are the pair ids and
// the metric is the closed-form combination sqrt(dX^2 + dY^2) of the factor
// metrics (no product graph is materialized). Warped nodes are quotient
// classes of pair ids after collapsing the zero-length fibers {(.,t) : w_d(t)
// = 0}; the metric is the shortest-path metric of the quotient graph whose
// edges are
//   Y-edges   (x,t)-(x,s): d_Y(t,s),
//   X-edges   (x,t)-(y,t): w_d(t) * d_X(x,y)        (dropped when w_d(t) = 0),
//   diagonals (x,t)-(y,s): sqrt(d_Y^2 + wbar^2 d_X^2), wbar = (w_d(t)+w_d(s))/2,
// plus the configured skew families with the same wbar combination over
// hop-limited factor displacements. Warped measure(x,t) = w_m(t) mu_Y(t) mu_X(x).
class ProductSpace {
public:
  enum class Kind { cartesian, warped };

  static constexpr std::int64_t kDefaultSizeCap = 1 << 22;

  static ProductSpace cartesian(FiniteSpace x, FiniteSpace y,
                                std::int64_t size_cap = kDefaultSizeCap);
  static ProductSpace warped(FiniteSpace x, FiniteSpace y, WarpSpec warp,
                             const WarpedOptions& opt = {},
                             std::int64_t size_cap = kDefaultSizeCap);

  Kind kind() const { return kind_; }
  bool is_warped() const { return kind_ == Kind::warped; }
  const FiniteSpace& factor_x() const { return x_; }
  const FiniteSpace& factor_y() const { return y_; }
  const WarpSpec& warp() const;

  std::int64_t pair_count() const {
    return static_cast<std::int64_t>(x_.size()) * y_.size();
  }
  int pair_id(int x, int y) const { return x * y_.size() + y; }
  int x_of(int pair) const { return pair / y_.size(); }
  int y_of(int pair) const { return pair % y_.size(); }

  int size() const;                       // node count
  int node(int x, int y) const;           // pair -> node
  // warped quotient map; empty on cartesian products (nodes are the pair ids)
  const std::vector<int>& collapse_map() const { return collapse_; }
  double measure(int node) const;
  double total_mass() const;
  double distance(int node_a, int node_b) const;
  std::vector<double> distance_row(int node) const;

  // warped only: the quotient graph carrying the warped metric
  const FiniteSpace& graph() const;

  // Builds a node-indexed field from fn(x_index, y_index). On a warped
  // product the values must agree on collapsed fibers (checked to 1e-9).
  template <class Fn>
  std::vector<double> make_field(Fn&& fn) const {
    std::vector<double> out(size(), 0.0);
    std::vector<char> set(size(), 0);
    for (int x = 0; x < x_.size(); ++x)
      for (int y = 0; y < y_.size(); ++y) {
        int nid = node(x, y);
        double v = fn(x, y);
        if (!set[nid]) {
          out[nid] = v;
          set[nid] = 1;
        } else if (std::abs(out[nid] - v) > 1e-9) {
          fail(ErrorKind::config, "make_field: value not constant on a collapsed fiber");
        }
      }
    return out;
  }

private:
  ProductSpace() = default;

  Kind kind_ = Kind::cartesian;
  FiniteSpace x_, y_;
  WarpSpec warp_;           // warped only
  FiniteSpace quotient_;    // warped only
  std::vector<int> collapse_;  // pair -> node (warped; empty = identity for cartesian)
  std::vector<double> cart_measures_;  // cartesian only
  double cart_mass_ = 0.0;
};

// Multiplies all edge lengths by 1/metric_factor and all measures by
// measure_factor (so distances shrink by metric_factor: d' = d / L).
FiniteSpace rescale_space(const FiniteSpace& space, double metric_factor,
                          double measure_factor);

// Blends a warp spec toward the constant w(t0): unchanged on B(t0, 2*delta),
// constant w(t0) outside B(t0, 3*delta), linear in distance between. When
// delta <= 0, searches the largest delta such that max/min of w_d over
// B(t0, 3*delta) stays <= 1 + eps. Throws Error(zero_warp_center) if
// w_d(t0) = 0.
WarpSpec localize_warp(const FiniteSpace& y, const WarpSpec& w, int t0,
                       double delta, double eps = 0.1);

// Pointwise product local Lipschitz constant. On a cartesian product the
// difference quotient |f(u,s) - f(x,t)| / sqrt(dX^2 + dY^2) is maximized over
// a direction-dense stencil: all coprime hop offsets (a,b) with max(a,b) <=
// max_hops over hop-limited factor neighborhoods (max_hops = 3 resolves
// directions to ~9 degrees). On a warped product this is local_lip of the
// quotient graph (whose skew families already make it direction-dense).
std::vector<double> product_local_lip(const ProductSpace& p,
                                      const std::vector<double>& f,
                                      int max_hops = 3);

// Beppo-Levi gradient: quadrature combination of the per-factor slice
// Lipschitz constants, sqrt(lipX^2 + lipY^2). Warped variant divides the
// X-slice term by w_d(t); the term is dropped where w_d(t) = 0 = w_m(t)
// (the fiber is collapsed and carries no mass), and a zero of w_d with
// w_m > 0 is an error. Values on a warped product are per node (max over
// constituent pairs; only zero-measure nodes have more than one).
std::vector<double> bl_gradient(const ProductSpace& p, const std::vector<double>& f);

void check_product_field(const ProductSpace& p, const std::vector<double>& f,
                         const char* what);

}  // namespace mms
