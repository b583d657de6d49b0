#include "mms/tensorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include "mms/analysis.hpp"
#include "mms/calculus.hpp"
#include "mms/parallel.hpp"

namespace mms {

TensorSumField TensorSumField::make(const FiniteSpace& x, const FiniteSpace& y,
                                    std::vector<std::vector<double>> gx,
                                    std::vector<std::vector<double>> hy) {
  if (gx.empty() || gx.size() != hy.size())
    fail(ErrorKind::config, "tensor sum needs N >= 1 matched factor pairs");
  for (const auto& g : gx) check_field(x, g, "TensorSumField.gx");
  for (const auto& h : hy) check_field(y, h, "TensorSumField.hy");
  return {std::move(gx), std::move(hy)};
}

std::vector<double> TensorSumField::evaluate(const ProductSpace& p) const {
  return p.make_field([&](int x, int y) {
    double v = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) v += gx[i][x] * hy[i][y];
    return v;
  });
}

namespace {

// slice lips evaluated per pair; warped X-slices are scaled by 1/w_d and the
// term is dropped on collapsed fibers (w_d = 0, where slices are constant)
std::vector<double> slice_lip(const ProductSpace& p, const std::vector<double>& f,
                              bool x_direction, bool warp_scale) {
  check_product_field(p, f, "slice_lip");
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int ny = Y.size();
  std::vector<double> out(p.size(), 0.0);
  if (!p.is_warped()) {
    parallel_for(p.pair_count(), [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) {
        const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
        const double f0 = f[q];
        double best = 0.0;
        if (x_direction) {
          for (const auto* nb = X.neighbors_begin(xi); nb != X.neighbors_end(xi); ++nb)
            best = std::max(best, std::abs(f[p.pair_id(nb->to, t)] - f0) / nb->length);
        } else {
          for (const auto* nb = Y.neighbors_begin(t); nb != Y.neighbors_end(t); ++nb)
            best = std::max(best, std::abs(f[p.pair_id(xi, nb->to)] - f0) / nb->length);
        }
        out[q] = best;
      }
    });
    return out;
  }
  const std::vector<double>& wd = p.warp().wd;
  for (int xi = 0; xi < X.size(); ++xi)
    for (int t = 0; t < ny; ++t) {
      const int nid = p.node(xi, t);
      const double f0 = f[nid];
      double best = 0.0;
      if (x_direction) {
        if (wd[t] == 0.0) continue;
        for (const auto* nb = X.neighbors_begin(xi); nb != X.neighbors_end(xi); ++nb)
          best = std::max(best, std::abs(f[p.node(nb->to, t)] - f0) / nb->length);
        if (warp_scale) best /= wd[t];
      } else {
        for (const auto* nb = Y.neighbors_begin(t); nb != Y.neighbors_end(t); ++nb)
          best = std::max(best, std::abs(f[p.node(xi, nb->to)] - f0) / nb->length);
      }
      out[nid] = std::max(out[nid], best);
    }
  return out;
}

void require_cartesian(const ProductSpace& p, const char* what) {
  if (p.is_warped())
    fail(ErrorKind::config, std::string(what) + " operates on cartesian products");
}

// sum over pairs of pair-measure * term(pair); collapsed fibers contribute
// their full measure this way, matching integration over the quotient
double pair_integral(const ProductSpace& p,
                     const std::function<double(std::size_t)>& term) {
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int ny = Y.size();
  if (!p.is_warped())
    return parallel_sum(p.pair_count(), [&](std::size_t q) {
      return X.measure(static_cast<int>(q) / ny) * Y.measure(static_cast<int>(q) % ny) *
             term(q);
    });
  const std::vector<double>& wm = p.warp().wm;
  return parallel_sum(p.pair_count(), [&](std::size_t q) {
    const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
    const double m = wm[t] * Y.measure(t) * X.measure(xi);
    return m == 0.0 ? 0.0 : m * term(q);
  });
}

double product_l2(const ProductSpace& p, const std::vector<double>& f) {
  const int ny = p.factor_y().size();
  return std::sqrt(pair_integral(p, [&](std::size_t q) {
    const double v =
        f[p.node(static_cast<int>(q) / ny, static_cast<int>(q) % ny)];
    return v * v;
  }));
}

}  // namespace

std::vector<double> slice_lip_x(const ProductSpace& p, const std::vector<double>& f) {
  require_cartesian(p, "slice_lip_x");
  return slice_lip(p, f, true, false);
}

std::vector<double> slice_lip_y(const ProductSpace& p, const std::vector<double>& f) {
  require_cartesian(p, "slice_lip_y");
  return slice_lip(p, f, false, false);
}

double x_energy(const ProductSpace& p, const std::vector<double>& f) {
  auto lip = slice_lip_x(p, f);
  return pair_integral(p, [&](std::size_t q) { return lip[q] * lip[q]; });
}

double y_energy(const ProductSpace& p, const std::vector<double>& f) {
  auto lip = slice_lip_y(p, f);
  return pair_integral(p, [&](std::size_t q) { return lip[q] * lip[q]; });
}

CubeAverages cube_average(const ProductSpace& p, const std::vector<double>& f,
                          const CubePartition& part) {
  require_cartesian(p, "cube_average");
  check_product_field(p, f, "cube_average");
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int m = static_cast<int>(part.centers.size());

  CubeAverages avg;
  avg.cube_mass.assign(m, 0.0);
  for (int t = 0; t < Y.size(); ++t) avg.cube_mass[part.assignment[t]] += Y.measure(t);
  for (int i = 0; i < m; ++i)
    if (!(avg.cube_mass[i] > 0.0))
      fail(ErrorKind::config, "cube_average: empty cube " + std::to_string(i));

  avg.fk.assign(m, std::vector<double>(X.size(), 0.0));
  parallel_for(static_cast<std::size_t>(X.size()), [&](std::size_t b, std::size_t e) {
    for (std::size_t x = b; x < e; ++x) {
      for (int t = 0; t < Y.size(); ++t)
        avg.fk[part.assignment[t]][x] += Y.measure(t) * f[p.pair_id(static_cast<int>(x), t)];
      for (int i = 0; i < m; ++i) avg.fk[i][x] /= avg.cube_mass[i];
    }
  });

  double f_sq = 0.0;
  {
    const double l2 = product_l2(p, f);
    f_sq = l2 * l2;
  }
  avg.worst_jensen_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double sq = 0.0;
    for (int x = 0; x < X.size(); ++x) sq += X.measure(x) * avg.fk[i][x] * avg.fk[i][x];
    avg.worst_jensen_excess =
        std::max(avg.worst_jensen_excess, sq - f_sq / avg.cube_mass[i]);
  }
  return avg;
}

SmoothResult smooth(const ProductSpace& p, const std::vector<double>& f,
                    const CubePartition& part, const PartitionOfUnity& pou) {
  require_cartesian(p, "smooth");
  check_product_field(p, f, "smooth");
  CubeAverages avg = cube_average(p, f, part);
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int m = static_cast<int>(part.centers.size());

  // active cubes per t (support property)
  std::vector<std::vector<int>> active(Y.size());
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < Y.size(); ++t)
      if (pou.chi[i][t] > 0.0) active[t].push_back(i);

  SmoothResult res;
  for (int t = 0; t < Y.size(); ++t)
    res.max_terms = std::max(res.max_terms, static_cast<int>(active[t].size()));

  res.field.assign(p.size(), 0.0);
  const int ny = Y.size();
  parallel_for(p.pair_count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const int x = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
      double v = 0.0;
      for (int i : active[t]) v += pou.chi[i][t] * avg.fk[i][x];
      res.field[q] = v;
    }
  });

  const double fn = product_l2(p, f);
  res.norm_ratio = fn > 0.0 ? product_l2(p, res.field) / fn : 0.0;
  return res;
}

SmoothResult smooth(const ProductSpace& p, const std::vector<double>& f, int k) {
  CubePartition part = build_cubes(p.factor_y(), k);
  PartitionOfUnity pou = partition_of_unity(p.factor_y(), part);
  return smooth(p, f, part, pou);
}

ConvergenceTable convergence_experiment(const ProductSpace& p,
                                        const std::vector<double>& f,
                                        const std::vector<int>& ks) {
  require_cartesian(p, "convergence_experiment");
  check_product_field(p, f, "convergence_experiment");
  if (ks.empty()) fail(ErrorKind::config, "convergence_experiment: empty k list");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1])
      fail(ErrorKind::config, "convergence_experiment: k values must increase");

  ConvergenceTable table;
  const double ref_x = x_energy(p, f);
  const double ref_y = y_energy(p, f);
  for (int k : ks) {
    SmoothResult s = smooth(p, f, k);
    ConvergenceRow row;
    row.k = k;
    row.l2_error = [&] {
      const int ny = p.factor_y().size();
      return std::sqrt(pair_integral(p, [&](std::size_t q) {
        const int nid = p.node(static_cast<int>(q) / ny, static_cast<int>(q) % ny);
        const double d = s.field[nid] - f[nid];
        return d * d;
      }));
    }();
    row.x_energy = x_energy(p, s.field);
    row.y_energy = y_energy(p, s.field);
    row.ref_x_energy = ref_x;
    row.ref_y_energy = ref_y;
    row.norm_ratio = s.norm_ratio;
    row.max_terms = s.max_terms;
    table.rows.push_back(row);
  }

  // log-log slope of the error against k (zero errors mean exact reproduction)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& row : table.rows) {
    if (row.l2_error <= 1e-14) continue;
    const double lx = std::log(static_cast<double>(row.k)), ly = std::log(row.l2_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  table.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return table;
}

void save_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "k,l2_error,x_energy,y_energy,ref_x_energy,ref_y_energy\n";
  char buf[128];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g", r.k, r.l2_error,
                  r.x_energy, r.y_energy, r.ref_x_energy, r.ref_y_energy);
    out << buf << "\n";
  }
}

namespace {

// interior pairs: both factor coordinates beyond boundary_hops of any
// degree-deficient (boundary) factor point
std::vector<char> product_interior(const ProductSpace& p, int hops) {
  const auto ix = interior_mask(p.factor_x(), hops);
  const auto iy = interior_mask(p.factor_y(), hops);
  std::vector<char> out(p.pair_count(), 0);
  const int ny = p.factor_y().size();
  for (std::size_t q = 0; q < out.size(); ++q)
    out[q] = ix[static_cast<int>(q) / ny] && iy[static_cast<int>(q) % ny];
  return out;
}

}  // namespace

LemmaReport lemma_lip_check(const ProductSpace& p, const std::vector<double>& f,
                            const RatioOptions& opt, double tol) {
  require_cartesian(p, "lemma_lip_check");
  auto plip = product_local_lip(p, f);
  auto lx = slice_lip_x(p, f);
  auto ly = slice_lip_y(p, f);
  auto interior = product_interior(p, opt.boundary_hops);

  double max_den = 0.0;
  for (std::size_t q = 0; q < plip.size(); ++q)
    if (interior[q]) max_den = std::max(max_den, lx[q] * lx[q] + ly[q] * ly[q]);

  LemmaReport rep;
  rep.tol = tol;
  rep.floor = opt.floor_frac * max_den;
  for (std::size_t q = 0; q < plip.size(); ++q) {
    if (!interior[q]) continue;
    const double den = lx[q] * lx[q] + ly[q] * ly[q];
    if (den <= rep.floor || den <= 0.0) continue;
    const double r = plip[q] * plip[q] / den;
    rep.max_r = std::max(rep.max_r, r);
    ++rep.interior_count;
    if (r > 4.0 + tol) ++rep.over_4;
  }
  return rep;
}

LemmaReport lemma_lip_check(const ProductSpace& p, const TensorSumField& tf,
                            const RatioOptions& opt, double tol) {
  return lemma_lip_check(p, tf.evaluate(p), opt, tol);
}

SandwichReport sandwich_report(const ProductSpace& p, const std::vector<double>& f,
                               const RatioOptions& opt) {
  require_cartesian(p, "sandwich_report");
  auto plip = product_local_lip(p, f);
  auto bl = bl_gradient(p, f);
  auto interior = product_interior(p, opt.boundary_hops);

  double max_bl = 0.0;
  for (std::size_t q = 0; q < bl.size(); ++q)
    if (interior[q]) max_bl = std::max(max_bl, bl[q]);

  SandwichReport rep;
  rep.floor = opt.floor_frac * max_bl;
  rep.min_rho = std::numeric_limits<double>::infinity();
  rep.histogram.assign(30, 0);
  for (std::size_t q = 0; q < bl.size(); ++q) {
    if (!interior[q] || bl[q] <= rep.floor || bl[q] <= 0.0) continue;
    const double rho = plip[q] / bl[q];
    rep.min_rho = std::min(rep.min_rho, rho);
    rep.max_rho = std::max(rep.max_rho, rho);
    ++rep.interior_count;
    ++rep.histogram[std::min(static_cast<int>(rho / 0.1), 29)];
  }
  if (rep.interior_count == 0) rep.min_rho = 0.0;
  return rep;
}

SandwichReport sandwich_report(const ProductSpace& p,
                               const std::vector<std::vector<double>>& fields,
                               const RatioOptions& opt) {
  if (fields.empty()) fail(ErrorKind::config, "sandwich_report: empty field list");
  SandwichReport merged;
  merged.min_rho = std::numeric_limits<double>::infinity();
  merged.histogram.assign(30, 0);
  for (const auto& f : fields) {
    SandwichReport rep = sandwich_report(p, f, opt);
    merged.min_rho = std::min(merged.min_rho, rep.min_rho);
    merged.max_rho = std::max(merged.max_rho, rep.max_rho);
    merged.interior_count += rep.interior_count;
    for (std::size_t b = 0; b < merged.histogram.size(); ++b)
      merged.histogram[b] += rep.histogram[b];
  }
  return merged;
}

double telescoping_residual(const ProductSpace& p, const CubeAverages& avg,
                            const PartitionOfUnity& pou,
                            const std::vector<std::pair<int, int>>& pairs,
                            int reference_cube) {
  const int m = static_cast<int>(avg.fk.size());
  if (reference_cube < 0 || reference_cube >= m)
    fail(ErrorKind::config, "telescoping_residual: bad reference cube");
  const int ny = p.factor_y().size();
  double worst = 0.0;
  for (auto [qa, qb] : pairs) {
    const int x = qa / ny, t = qa % ny, s = qb % ny;
    if (qb / ny != x)
      fail(ErrorKind::config, "telescoping_residual: pair must share the x coordinate");
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < m; ++i) {
      lhs += pou.chi[i][t] * avg.fk[i][x] - pou.chi[i][s] * avg.fk[i][x];
      rhs += (pou.chi[i][t] - pou.chi[i][s]) *
             (avg.fk[i][x] - avg.fk[reference_cube][x]);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

NeighborDiffReport neighbor_difference_check(const ProductSpace& p,
                                             const std::vector<double>& f,
                                             const CubePartition& part) {
  require_cartesian(p, "neighbor_difference_check");
  CubeAverages avg = cube_average(p, f, part);
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int m = static_cast<int>(part.centers.size());
  const double rad = 6.0 / part.k;

  NeighborDiffReport rep;
  std::vector<double> var(X.size());
  for (int j = 0; j < m; ++j) {
    if (part.neighbors[j].empty()) continue;
    auto ball = Y.ball(part.centers[j], rad);
    double ball_mass = 0.0;
    for (int t : ball) ball_mass += Y.measure(t);
    for (int x = 0; x < X.size(); ++x) {
      double mu = 0.0;
      for (int t : ball) mu += Y.measure(t) * f[p.pair_id(x, t)];
      mu /= ball_mass;
      double v = 0.0;
      for (int t : ball) {
        const double d = f[p.pair_id(x, t)] - mu;
        v += Y.measure(t) * d * d;
      }
      var[x] = v / ball_mass;
    }
    for (int i : part.neighbors[j]) {
      rep.c_measured =
          std::max(rep.c_measured, 2.0 * (ball_mass / avg.cube_mass[i] +
                                          ball_mass / avg.cube_mass[j]));
      for (int x = 0; x < X.size(); ++x) {
        const double diff = avg.fk[i][x] - avg.fk[j][x];
        if (var[x] > 0.0)
          rep.worst_ratio = std::max(rep.worst_ratio, diff * diff / var[x]);
        else if (diff * diff > 1e-24)
          rep.worst_ratio = std::numeric_limits<double>::infinity();
      }
    }
  }
  rep.ok = rep.worst_ratio <= rep.c_measured + 1e-9;
  return rep;
}

CutoffFamily build_cutoffs(const ProductSpace& p, int x0, int t0, int n, int m, int k) {
  if (!p.is_warped()) fail(ErrorKind::config, "build_cutoffs needs a warped product");
  if (n <= 1) fail(ErrorKind::config, "build_cutoffs: n must exceed 1");
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  if (x0 < 0 || x0 >= X.size() || t0 < 0 || t0 >= Y.size())
    fail(ErrorKind::config, "build_cutoffs: bad base point");

  CutoffFamily fam;
  fam.n = n;
  fam.m = m;
  fam.k = k;

  CubePartition part = build_cubes(Y, k);
  PartitionOfUnity pou = partition_of_unity(Y, part);
  const double outer = 5.0 / (4.0 * k);
  auto row0 = Y.distance_row(t0);

  // psi = sum of chi over cubes whose bump support meets B(t0, n)
  fam.psi.assign(Y.size(), 0.0);
  for (std::size_t i = 0; i < part.centers.size(); ++i) {
    auto rowc = Y.distance_row(part.centers[i]);
    bool meets = false;
    for (int t = 0; t < Y.size() && !meets; ++t)
      meets = (*rowc)[t] < outer && (*row0)[t] <= static_cast<double>(n);
    if (!meets) continue;
    for (int t = 0; t < Y.size(); ++t) fam.psi[t] += pou.chi[i][t];
  }

  auto rowx = X.distance_row(x0);
  fam.sigma.assign(X.size(), 0.0);
  for (int x = 0; x < X.size(); ++x)
    fam.sigma[x] = std::clamp(static_cast<double>(m) - (*rowx)[x], 0.0, 1.0);

  // eta from the multi-source distance D to {w_m = 0}
  const std::vector<double>& wm = p.warp().wm;
  std::vector<int> zeros;
  for (int t = 0; t < Y.size(); ++t)
    if (wm[t] == 0.0) zeros.push_back(t);
  fam.eta.assign(Y.size(), 1.0);
  if (!zeros.empty()) {
    const double logn = std::log(static_cast<double>(n));
    for (int t = 0; t < Y.size(); ++t) {
      double d = std::numeric_limits<double>::infinity();
      for (int z : zeros) d = std::min(d, Y.distance(z, t));
      fam.eta[t] =
          d <= 0.0 ? 0.0 : std::clamp(1.0 - std::abs(std::log(d)) / logn, 0.0, 1.0);
    }
  }

  fam.multiplier = p.make_field(
      [&](int x, int y) { return fam.psi[y] * fam.eta[y] * fam.sigma[x]; });
  return fam;
}

DecayCheck check_linear_decay(const FiniteSpace& y, const WarpSpec& w,
                              double min_separation) {
  DecayCheck check;
  for (int t = 0; t < y.size(); ++t)
    if (w.wm[t] == 0.0) check.zeros.push_back(t);
  check.min_zero_separation = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < check.zeros.size(); ++a) {
    auto row = y.distance_row(check.zeros[a]);
    for (std::size_t b = a + 1; b < check.zeros.size(); ++b)
      check.min_zero_separation =
          std::min(check.min_zero_separation, (*row)[check.zeros[b]]);
  }
  if (check.min_zero_separation < min_separation)
    fail(ErrorKind::hypothesis_violated,
         "zero set of w_m is not discrete at separation " +
             std::to_string(min_separation));

  if (!check.zeros.empty()) {
    for (int t = 0; t < y.size(); ++t) {
      double d = std::numeric_limits<double>::infinity();
      for (int z : check.zeros) d = std::min(d, y.distance(z, t));
      if (d > 0.0) check.constant = std::max(check.constant, w.wm[t] / d);
    }
  }
  return check;
}

CutoffTable cutoff_convergence(const ProductSpace& p, const std::vector<double>& f,
                               int x0, int t0,
                               const std::vector<std::array<int, 3>>& schedule,
                               double min_zero_separation, double decay_cap) {
  if (!p.is_warped()) fail(ErrorKind::config, "cutoff_convergence needs a warped product");
  check_product_field(p, f, "cutoff_convergence");
  if (schedule.empty()) fail(ErrorKind::config, "cutoff_convergence: empty schedule");
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  if (min_zero_separation < 0.0) min_zero_separation = 4.0 * Y.resolution();

  CutoffTable table;
  DecayCheck decay = check_linear_decay(Y, p.warp(), min_zero_separation);
  table.decay_constant = decay.constant;
  if (decay_cap > 0.0 && decay.constant > decay_cap) {
    int worst = -1;
    double worst_ratio = 0.0;
    for (int t = 0; t < Y.size(); ++t) {
      double d = std::numeric_limits<double>::infinity();
      for (int z : decay.zeros) d = std::min(d, Y.distance(z, t));
      if (d > 0.0 && p.warp().wm[t] / d > worst_ratio) {
        worst_ratio = p.warp().wm[t] / d;
        worst = t;
      }
    }
    fail(ErrorKind::decay_hypothesis,
         "w_m / D = " + std::to_string(worst_ratio) + " at y-point " +
             std::to_string(worst) + " exceeds cap " + std::to_string(decay_cap));
  }

  // reference slice gradients of f and shared factor data
  auto lipx_f = slice_lip(p, f, true, true);
  auto lipy_f = slice_lip(p, f, false, false);
  auto rowx = X.distance_row(x0);
  auto rowy = Y.distance_row(t0);
  std::vector<double> dzero(Y.size(), std::numeric_limits<double>::infinity());
  for (int t = 0; t < Y.size(); ++t)
    for (int z : decay.zeros) dzero[t] = std::min(dzero[t], Y.distance(z, t));
  const double c3 = [&] {
    auto radii = default_radii(Y);
    return std::pow(metric_doubling(Y, radii).metric_constant, 3.0);
  }();
  const double f_inf = linf_norm(f);
  const int ny = Y.size();

  for (const auto& row_spec : schedule) {
    const int n = row_spec[0], m = row_spec[1], k = row_spec[2];
    CutoffFamily fam = build_cutoffs(p, x0, t0, n, m, k);
    const double c1k = [&] {
      CubePartition part = build_cubes(Y, k);
      return partition_of_unity(Y, part).c1 * k;
    }();
    const double logn = std::log(static_cast<double>(n));

    std::vector<double> err(p.size());
    for (int q = 0; q < p.size(); ++q) err[q] = f[q] - fam.multiplier[q] * f[q];

    CutoffRow out;
    out.n = n;
    out.m = m;
    out.k = k;
    out.l2_error = product_l2(p, err);
    {
      auto bl = bl_gradient(p, err);
      out.bl_error = std::sqrt(pair_integral(p, [&](std::size_t q) {
        const double v = bl[p.node(static_cast<int>(q) / ny, static_cast<int>(q) % ny)];
        return v * v;
      }));
    }

    auto sq = [](double v) { return v * v; };
    out.x_deficit = std::sqrt(pair_integral(p, [&](std::size_t q) {
      const int nid = p.node(static_cast<int>(q) / ny, static_cast<int>(q) % ny);
      return sq(std::abs(fam.multiplier[nid] - 1.0) * lipx_f[nid]);
    }));
    out.t_deficit = std::sqrt(pair_integral(p, [&](std::size_t q) {
      const int nid = p.node(static_cast<int>(q) / ny, static_cast<int>(q) % ny);
      return sq(std::abs(fam.multiplier[nid] - 1.0) * lipy_f[nid]);
    }));
    out.x_tail = std::sqrt(pair_integral(p, [&](std::size_t q) {
      const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
      if ((*rowx)[xi] < m - 1.0) return 0.0;
      return sq(f[p.node(xi, t)]);
    }));
    out.t_psi_tail = std::sqrt(pair_integral(p, [&](std::size_t q) {
      const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
      if ((*rowy)[t] < n - 1.0) return 0.0;
      return sq(c1k * c3 * f[p.node(xi, t)]);
    }));
    out.t_eta_term = std::sqrt(pair_integral(p, [&](std::size_t q) {
      const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
      if ((*rowx)[xi] > static_cast<double>(m) || (*rowy)[t] > static_cast<double>(n))
        return 0.0;
      const double d = dzero[t];
      if (!(d >= 1.0 / n && d <= 1.0)) return 0.0;
      return sq(f[p.node(xi, t)] / (d * logn));
    }));

    out.zeros_in_ball = 0;
    for (int z : decay.zeros)
      if ((*rowy)[z] <= n - 1.0) ++out.zeros_in_ball;
    out.eta_bound = out.zeros_in_ball * decay.constant * f_inf * f_inf *
                    X.ball_measure(x0, static_cast<double>(m)) / logn;
    out.eta_ok = out.t_eta_term * out.t_eta_term <= out.eta_bound * (1.0 + 1e-9) + 1e-15;
    table.rows.push_back(out);
  }

  // fit t_eta_term ~ c / log n and check monotonicity along increasing n
  double su2 = 0.0, stu = 0.0;
  for (const auto& r : table.rows) {
    const double u = 1.0 / std::log(static_cast<double>(r.n));
    su2 += u * u;
    stu += r.t_eta_term * u;
  }
  table.eta_fit_c = su2 > 0.0 ? stu / su2 : 0.0;
  table.eta_fit_residual = 0.0;
  table.eta_monotone = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const double fit = table.eta_fit_c / std::log(static_cast<double>(r.n));
    if (r.t_eta_term > 0.0)
      table.eta_fit_residual = std::max(
          table.eta_fit_residual, std::abs(r.t_eta_term - fit) / r.t_eta_term);
    if (i > 0 && table.rows[i].n > table.rows[i - 1].n &&
        table.rows[i].t_eta_term > table.rows[i - 1].t_eta_term + 1e-12)
      table.eta_monotone = false;
  }
  return table;
}

}  // namespace mms
