#pragma once

#include <iosfwd>
#include <vector>

#include "mms/space.hpp"

namespace mms {

// Greedy maximal sep-separated subset: points scanned in index order, kept
// iff farther than sep from every kept point. Maximality: every point lies
// within sep of some center.
std::vector<int> build_net(const FiniteSpace& space, double sep);

// Voronoi cells of a greedy maximal (1/k)-net. Cells of a maximal net
// satisfy B(t_i, 1/(2k)) subset Q_i subset B(t_i, 1/k), strictly tighter
// than the required 1/(3k) / (5/(4k) + h) sandwich.
struct CubePartition {
  int k = 0;
  std::vector<int> centers;                // net points, in greedy (index) order
  std::vector<int> assignment;             // point -> cube id (nearest center,
                                           // ties to the smallest id)
  std::vector<std::vector<int>> members;   // cube id -> its points, ascending
  std::vector<std::vector<int>> neighbors; // cube ids at set-distance < 1/k,
                                           // ascending, self excluded
};

// Requires 1/k > 4h (throws Error(scale_unresolvable) otherwise).
CubePartition build_cubes(const FiniteSpace& space, int k);

// Normalized bumps: chi_i = phi_i / sum_j phi_j with
// phi_i(t) = clamp((5/(4k) - d(t,t_i)) / (5/(4k) - 1/(3k)), 0, 1).
// sum chi = 1 by construction; supp chi_i inside B(t_i, 5/(4k) + h); the
// Lipschitz constants scale like k and the attained c1 is recorded.
struct PartitionOfUnity {
  int k = 0;
  std::vector<std::vector<double>> chi;  // per cube, a field on the space
  double c1 = 0.0;                   // max_i global_lip(chi_i) / k
  double inner_ball_deviation = 0.0; // sup over i of |chi_i - 1| on B(t_i, 1/(3k))
  double cover_min = 0.0;            // min over points of sum_j phi_j (diagnostic)
};

// Throws Error(cover_gap) if some point has sum phi = 0 (impossible for a
// maximal net; kept as a guard).
PartitionOfUnity partition_of_unity(const FiniteSpace& space, const CubePartition& p);

// JSON dump: {k, centers, assignment, neighbors, c1_measured, inner_ball_deviation}.
void dump_partition(std::ostream& out, const CubePartition& p, const PartitionOfUnity& pou);

// Re-verification of every partition invariant from scratch (independent of
// how the partition was built), used by scenarios and the acceptance suite.
struct PartitionChecks {
  bool total = false;           // assignment single-valued and exhaustive
  bool separation = false;      // d(t_i, t_j) > 1/k for i != j, exact
  bool inner_ball = false;      // B(t_i, 1/(3k)) subset Q_i
  bool outer_ball = false;      // Q_i subset B(t_i, 5/(4k) + h)
  bool neighbor_count = false;  // max #neighbors <= metric_c^3
  bool neighbor_dist = false;   // neighbor centers within 4/k
  bool chi_sum = false;         // |sum_i chi_i - 1| <= 1e-12 everywhere
  bool chi_range = false;       // chi in [0,1]
  bool chi_support = false;     // chi_i > 0 only within 5/(4k) + h of t_i
  int max_neighbors = 0;
  double chi_sum_deviation = 0.0;
  bool all() const {
    return total && separation && inner_ball && outer_ball && neighbor_count &&
           neighbor_dist && chi_sum && chi_range && chi_support;
  }
};
PartitionChecks verify_partition(const FiniteSpace& space, const CubePartition& p,
                                 const PartitionOfUnity& pou, double metric_c);

}  // namespace mms
