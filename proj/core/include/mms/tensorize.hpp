#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mms/cubes.hpp"
#include "mms/products.hpp"

namespace mms {

// f(x,t) = sum_i gx[i](x) * hy[i](t)
struct TensorSumField {
  std::vector<std::vector<double>> gx;  // factors on X
  std::vector<std::vector<double>> hy;  // factors on Y

  static TensorSumField make(const FiniteSpace& x, const FiniteSpace& y,
                             std::vector<std::vector<double>> gx,
                             std::vector<std::vector<double>> hy);
  std::vector<double> evaluate(const ProductSpace& p) const;
};

// Slice Lipschitz constants on a cartesian product: the factor-direction
// local lip at each pair, using the factor metrics.
std::vector<double> slice_lip_x(const ProductSpace& p, const std::vector<double>& f);
std::vector<double> slice_lip_y(const ProductSpace& p, const std::vector<double>& f);

// int lip(slice)^2 dm over the product measure.
double x_energy(const ProductSpace& p, const std::vector<double>& f);
double y_energy(const ProductSpace& p, const std::vector<double>& f);

// Per-cube Y-averages f_i(x) = weighted mean of f(x,.) over cube Q_i, with
// the Jensen bound ||f_i||^2_{L2(X)} <= ||f||^2_{L2} / mu_Y(Q_i) evaluated.
struct CubeAverages {
  std::vector<std::vector<double>> fk;  // per cube, a field on X
  std::vector<double> cube_mass;        // mu_Y(Q_i)
  double worst_jensen_excess = 0.0;     // max_i ||f_i||^2 - ||f||^2/mu(Q_i); <= 0 expected
};
CubeAverages cube_average(const ProductSpace& p, const std::vector<double>& f,
                          const CubePartition& part);

// Smoothing operator F(x,t) = sum_i chi_i(t) f_i(x).
struct SmoothResult {
  std::vector<double> field;
  double norm_ratio = 0.0;  // ||F||_{L2} / ||f||_{L2}; uniform boundedness constant
  int max_terms = 0;        // max cubes active at one t (support property)
};
SmoothResult smooth(const ProductSpace& p, const std::vector<double>& f,
                    const CubePartition& part, const PartitionOfUnity& pou);
SmoothResult smooth(const ProductSpace& p, const std::vector<double>& f, int k);

struct ConvergenceRow {
  int k = 0;
  double l2_error = 0.0;
  double x_energy = 0.0;
  double y_energy = 0.0;
  double ref_x_energy = 0.0;
  double ref_y_energy = 0.0;
  double norm_ratio = 0.0;
  int max_terms = 0;
};
struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  // log-log slope of l2_error against k
};
// CSV with header k,l2_error,x_energy,y_energy,ref_x_energy,ref_y_energy
void save_csv(std::ostream& out, const ConvergenceTable& table);

// L2 error and slice energies of F_k against the reference energies of f,
// over strictly increasing k.
ConvergenceTable convergence_experiment(const ProductSpace& p,
                                        const std::vector<double>& f,
                                        const std::vector<int>& ks);

// Interior/denominator policy shared by the ratio checks. Ratios are formed
// only at points farther than boundary_hops from factor boundaries and with
// denominator above floor_frac * (interior max): near-critical points carry
// an O(h) second-order numerator against a vanishing denominator, which says
// nothing about the inequality being tested.
struct RatioOptions {
  int boundary_hops = 3;
  double floor_frac = 0.6;
};

// r = product_lip^2 / (slice_lip_x^2 + slice_lip_y^2) on a cartesian
// product; the splitting bound is r <= 4.
struct LemmaReport {
  double max_r = 0.0;
  int interior_count = 0;
  int over_4 = 0;  // points with r > 4 + tol
  double floor = 0.0;
  double tol = 0.05;
};
LemmaReport lemma_lip_check(const ProductSpace& p, const std::vector<double>& f,
                            const RatioOptions& opt = {}, double tol = 0.05);
LemmaReport lemma_lip_check(const ProductSpace& p, const TensorSumField& tf,
                            const RatioOptions& opt = {}, double tol = 0.05);

// rho = product_lip / bl_gradient; lower bound rho >= 1 - tol is the
// Beppo-Levi inclusion direction, max rho is the empirical sandwich constant.
struct SandwichReport {
  double min_rho = 0.0;
  double max_rho = 0.0;
  int interior_count = 0;
  double floor = 0.0;
  std::vector<int> histogram;  // 30 buckets of width 0.1 from 0, last = overflow
};
SandwichReport sandwich_report(const ProductSpace& p, const std::vector<double>& f,
                               const RatioOptions& opt = {});
// Merged report over a field list (min/max/histogram folded; floor is
// per-field and reported as 0 in the merge).
SandwichReport sandwich_report(const ProductSpace& p,
                               const std::vector<std::vector<double>>& fields,
                               const RatioOptions& opt = {});

// Telescoping identity F(x,t) - F(x,s) = sum_i (chi_i(t) - chi_i(s)) *
// (f_i(x) - f_j(x)) for any reference cube j; returns the worst residual
// over the given (pair point, pair point) samples.
double telescoping_residual(const ProductSpace& p, const CubeAverages& avg,
                            const PartitionOfUnity& pou,
                            const std::vector<std::pair<int, int>>& pairs,
                            int reference_cube);

// Neighbor-difference bound: for neighbor cubes i ~ j and every x,
// |f_i(x) - f_j(x)|^2 <= c * mean over B_jk = B(t_j, 6/k) of |f(x,.) -
// mean_{B_jk} f(x,.)|^2, with c = 2 max_{i~j} (mu(B_jk)/mu(Q_i) +
// mu(B_jk)/mu(Q_j)) the measured comparability constant.
struct NeighborDiffReport {
  double c_measured = 0.0;    // the comparability constant above
  double worst_ratio = 0.0;   // max over (x, i~j) of lhs/rhs
  bool ok = false;            // worst_ratio <= c_measured (+1e-9)
};
NeighborDiffReport neighbor_difference_check(const ProductSpace& p,
                                             const std::vector<double>& f,
                                             const CubePartition& part);

// Cutoff machinery on warped products.
struct CutoffFamily {
  int n = 0, m = 0, k = 0;
  std::vector<double> psi;         // on Y: sum of chi over cubes meeting B(t0, n)
  std::vector<double> sigma;       // on X: clamp(m - d(x,x0), 0, 1)
  std::vector<double> eta;         // on Y: clamp(1 - |log D|/log n, 0, 1)
  std::vector<double> multiplier;  // node field psi*eta*sigma
};
CutoffFamily build_cutoffs(const ProductSpace& p, int x0, int t0, int n, int m, int k);

// w_m(t) <= C * D(t) with D the distance to {w_m = 0}; reports the smallest
// such C and the zero set. Throws Error(hypothesis_violated) when the zero
// set is non-discrete (pairwise closer than min_separation).
struct DecayCheck {
  double constant = 0.0;       // sup over D > 0 of w_m / D
  std::vector<int> zeros;      // indices with w_m = 0
  double min_zero_separation = 0.0;
};
DecayCheck check_linear_decay(const FiniteSpace& y, const WarpSpec& w,
                              double min_separation);

struct CutoffRow {
  int n = 0, m = 0, k = 0;
  double l2_error = 0.0;      // ||f - psi*eta*sigma*f||_{L2(m_w)}
  double bl_error = 0.0;      // ||bl_gradient(f - multiplier*f)||_{L2(m_w)}
  double x_deficit = 0.0;     // || |multiplier - 1| * lip_x f ||
  double x_tail = 0.0;        // || f 1_{d_X >= m-1} ||
  double t_deficit = 0.0;     // || |multiplier - 1| * lip_y f ||
  double t_psi_tail = 0.0;    // || c1 C^3 k f 1_{d_Y >= n-1} ||
  double t_eta_term = 0.0;    // || f 1_{d_X<=m} 1_{d_Y<=n} 1_{D in [1/n,1]} / (D log n) ||
  double eta_bound = 0.0;     // N * C * ||f||_inf^2 * m_X(B(x0,m)) / log n
  int zeros_in_ball = 0;      // N above
  bool eta_ok = false;        // t_eta_term^2 <= eta_bound (the proof's display)
};
struct CutoffTable {
  std::vector<CutoffRow> rows;
  double decay_constant = 0.0;
  double eta_fit_c = 0.0;         // least squares t_eta_term ~ c / log n
  double eta_fit_residual = 0.0;  // max relative residual of the fit
  bool eta_monotone = false;      // nonincreasing along increasing n
};
// Schedule rows are (n, m, k). Runs the linear-decay verifier first; a
// positive decay_cap turns a reported constant above it into
// Error(decay_hypothesis) with the worst witness.
CutoffTable cutoff_convergence(const ProductSpace& p, const std::vector<double>& f,
                               int x0, int t0,
                               const std::vector<std::array<int, 3>>& schedule,
                               double min_zero_separation = -1.0,
                               double decay_cap = 0.0);

}  // namespace mms
