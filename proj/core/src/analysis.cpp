#include "mms/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "mms/calculus.hpp"
#include "mms/parallel.hpp"

namespace mms {

std::vector<double> default_radii(const FiniteSpace& space, int count) {
  if (count < 1) fail(ErrorKind::config, "default_radii: count < 1");
  const double hi = space.diameter() / 2.0;
  const double lo = std::min(4.0 * space.resolution(), hi);
  if (count == 1 || lo == hi) return {hi};
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

namespace {

void check_radii(const FiniteSpace& space, const std::vector<double>& radii,
                 std::vector<std::string>& warnings) {
  if (radii.empty()) fail(ErrorKind::config, "doubling: empty radii");
  for (double r : radii) {
    if (!(r > 0.0)) fail(ErrorKind::config, "doubling: nonpositive radius");
    if (r <= space.resolution())
      warnings.push_back("radius " + std::to_string(r) +
                         " at or below resolution; balls may be single points");
    else if (r > space.diameter())
      warnings.push_back("radius " + std::to_string(r) + " exceeds the diameter");
  }
}

}  // namespace

DoublingReport measure_doubling(const FiniteSpace& space, const std::vector<double>& radii) {
  DoublingReport rep;
  rep.radii = radii;
  check_radii(space, radii, rep.warnings);

  auto worst_at = [&](int x) {
    auto row = space.distance_row(x);
    double best = 0.0;
    for (double r : radii) {
      double inner = 0.0, outer = 0.0;
      for (int j = 0; j < space.size(); ++j) {
        double d = (*row)[j];
        if (d <= r) inner += space.measure(j);
        if (d <= 2.0 * r) outer += space.measure(j);
      }
      if (inner > 0.0) best = std::max(best, outer / inner);
    }
    return best;
  };
  auto [best, arg] =
      parallel_max(static_cast<std::size_t>(space.size()),
                   [&](std::size_t i) { return worst_at(static_cast<int>(i)); });
  rep.measure_constant = std::max(best, 1.0);
  rep.measure_witness.center = static_cast<int>(arg);

  // recover the witness radius at the witness center
  auto row = space.distance_row(rep.measure_witness.center);
  for (double r : radii) {
    double inner = 0.0, outer = 0.0;
    for (int j = 0; j < space.size(); ++j) {
      double d = (*row)[j];
      if (d <= r) inner += space.measure(j);
      if (d <= 2.0 * r) outer += space.measure(j);
    }
    if (inner > 0.0 && outer / inner == best) {
      rep.measure_witness.radius = r;
      break;
    }
  }
  return rep;
}

namespace {

int greedy_cover_size(const FiniteSpace& space, int center, double r) {
  std::vector<int> ball = space.ball(center, r);  // ascending indices
  std::vector<char> covered(ball.size(), 0);
  int count = 0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (covered[i]) continue;
    ++count;
    auto row = space.distance_row(ball[i]);
    for (std::size_t j = i; j < ball.size(); ++j)
      if (!covered[j] && (*row)[ball[j]] <= r / 2.0) covered[j] = 1;
  }
  return count;
}

}  // namespace

DoublingReport metric_doubling(const FiniteSpace& space, const std::vector<double>& radii) {
  DoublingReport rep;
  rep.radii = radii;
  check_radii(space, radii, rep.warnings);

  auto worst_at = [&](int x) {
    int best = 1;
    for (double r : radii) best = std::max(best, greedy_cover_size(space, x, r));
    return static_cast<double>(best);
  };
  auto [best, arg] =
      parallel_max(static_cast<std::size_t>(space.size()),
                   [&](std::size_t i) { return worst_at(static_cast<int>(i)); });
  rep.metric_constant = std::max(best, 1.0);
  rep.metric_witness.center = static_cast<int>(arg);
  for (double r : radii)
    if (greedy_cover_size(space, rep.metric_witness.center, r) == static_cast<int>(best)) {
      rep.metric_witness.radius = r;
      break;
    }
  return rep;
}

DoublingReport doubling_report(const FiniteSpace& space, const std::vector<double>& radii) {
  DoublingReport rep = measure_doubling(space, radii);
  DoublingReport metric = metric_doubling(space, radii);
  rep.metric_constant = metric.metric_constant;
  rep.metric_witness = metric.metric_witness;
  for (auto& w : metric.warnings) rep.warnings.push_back(std::move(w));
  return rep;
}

RemarkCheck verify_doubling_remark(const FiniteSpace& space, const std::vector<double>& radii) {
  RemarkCheck check;
  check.report = doubling_report(space, radii);
  const double d4 = std::pow(check.report.measure_constant, 4.0);
  check.slack = d4 - check.report.metric_constant;
  check.ok = check.slack >= 0.0;
  return check;
}

namespace {

// deterministic symmetry-free start vector
double hashed_unit(std::uint64_t i) {
  std::uint64_t z = (i + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
}

// dense Cholesky in place: A = L L^T (lower), then solves
void cholesky(std::vector<double>& a, int n) {
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) fail(ErrorKind::no_convergence, "surrogate operator not positive definite");
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
}

void cholesky_solve(const std::vector<double>& l, int n, std::vector<double>& b) {
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
}

}  // namespace

PoincareReport poincare_constant(const FiniteSpace& space, int center, double radius,
                                 double lambda, int max_iterations, double tol) {
  if (center < 0 || center >= space.size())
    fail(ErrorKind::config, "poincare_constant: bad center");
  if (!(radius > 0.0) || lambda < 1.0)
    fail(ErrorKind::config, "poincare_constant: need radius > 0, lambda >= 1");

  auto row = space.distance_row(center);
  std::vector<char> in_b(space.size(), 0), in_lb(space.size(), 0), active(space.size(), 0);
  for (int i = 0; i < space.size(); ++i) {
    if ((*row)[i] <= radius) in_b[i] = 1;
    if ((*row)[i] <= lambda * radius) in_lb[i] = active[i] = 1;
  }
  for (int i = 0; i < space.size(); ++i)
    if (in_lb[i])
      for (const auto* nb = space.neighbors_begin(i); nb != space.neighbors_end(i); ++nb)
        active[nb->to] = 1;

  std::vector<int> idx;  // active set, ascending
  for (int i = 0; i < space.size(); ++i)
    if (active[i]) idx.push_back(i);
  const int n = static_cast<int>(idx.size());
  if (n < 2) fail(ErrorKind::config, "poincare_constant: ball too small");
  if (n > 2000) fail(ErrorKind::too_large, "poincare_constant: active set exceeds dense cap");
  std::vector<int> pos(space.size(), -1);
  for (int i = 0; i < n; ++i) pos[idx[i]] = i;

  // quadratic surrogate: E(u) = rad^2 * sum_{x in lambda B} mu_x *
  // (1/deg x) * sum_{edges at x} (du/len)^2; numerator weights on B.
  std::vector<double> mu_b(n, 0.0);
  double mass_b = 0.0;
  for (int i = 0; i < n; ++i)
    if (in_b[idx[i]]) {
      mu_b[i] = space.measure(idx[i]);
      mass_b += mu_b[i];
    }
  if (mass_b <= 0.0) fail(ErrorKind::config, "poincare_constant: ball has no mass");

  const double rad2 = radius * radius;
  std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    int x = idx[i];
    if (!in_lb[x]) continue;
    const double w0 = rad2 * space.measure(x) / std::max(space.degree(x), 1);
    for (const auto* nb = space.neighbors_begin(x); nb != space.neighbors_end(x); ++nb) {
      int j = pos[nb->to];
      const double w = w0 / (nb->length * nb->length);
      e[static_cast<std::size_t>(i) * n + i] += w;
      e[static_cast<std::size_t>(j) * n + j] += w;
      e[static_cast<std::size_t>(i) * n + j] -= w;
      e[static_cast<std::size_t>(j) * n + i] -= w;
    }
  }

  // deflate constants (E's nullspace): Edef = E + mu_b mu_b^T
  std::vector<double> edef = e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edef[static_cast<std::size_t>(i) * n + j] += mu_b[i] * mu_b[j];
  cholesky(edef, n);

  auto apply_n = [&](const std::vector<double>& u, std::vector<double>& out) {
    double ubar = 0.0;
    for (int i = 0; i < n; ++i) ubar += mu_b[i] * u[i];
    ubar /= mass_b;
    for (int i = 0; i < n; ++i) out[i] = mu_b[i] * (u[i] - ubar) / mass_b;
  };
  auto quad = [&](const std::vector<double>& m, const std::vector<double>& u) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = 0.0;
      for (int j = 0; j < n; ++j) r += m[static_cast<std::size_t>(i) * n + j] * u[j];
      s += u[i] * r;
    }
    return s;
  };

  std::vector<double> u(n), v(n);
  for (int i = 0; i < n; ++i) u[i] = hashed_unit(static_cast<std::uint64_t>(idx[i]));
  int iters = 0;
  for (;; ++iters) {
    if (iters >= max_iterations)
      fail(ErrorKind::no_convergence, "poincare_constant: inverse iteration stalled");
    apply_n(u, v);
    cholesky_solve(edef, n, v);
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm == 0.0) fail(ErrorKind::no_convergence, "poincare_constant: degenerate iterate");
    for (double& x : v) x /= norm;
    double dplus = 0.0, dminus = 0.0;
    for (int i = 0; i < n; ++i) {
      dplus += (v[i] - u[i]) * (v[i] - u[i]);
      dminus += (v[i] + u[i]) * (v[i] + u[i]);
    }
    u = v;
    if (std::sqrt(std::min(dplus, dminus)) < tol) break;
  }

  PoincareReport rep;
  rep.center = center;
  rep.radius = radius;
  rep.lambda = lambda;
  rep.iterations = iters + 1;

  // surrogate quotient
  std::vector<double> nu(n);
  apply_n(u, nu);
  double num = 0.0;
  for (int i = 0; i < n; ++i) num += u[i] * nu[i];
  rep.c_p_surrogate = num / quad(e, u);

  // true quotient with the max-edge lip at the converged extremal
  rep.extremal.assign(space.size(), 0.0);
  for (int i = 0; i < n; ++i) rep.extremal[idx[i]] = u[i];
  auto lip = local_lip(space, rep.extremal);
  double den = 0.0;
  for (int i = 0; i < space.size(); ++i)
    if (in_lb[i]) den += space.measure(i) * lip[i] * lip[i];
  rep.c_p = num / (rad2 * den);
  return rep;
}

PoincareCheck poincare_check(const FiniteSpace& space, const std::vector<double>& u,
                             const std::vector<double>& g, int center, double radius,
                             double lambda, double c_p) {
  check_field(space, u, "poincare_check.u");
  check_field(space, g, "poincare_check.g");
  auto row = space.distance_row(center);
  double mass_b = 0.0, ubar = 0.0;
  for (int i = 0; i < space.size(); ++i)
    if ((*row)[i] <= radius) {
      mass_b += space.measure(i);
      ubar += space.measure(i) * u[i];
    }
  if (mass_b <= 0.0) fail(ErrorKind::config, "poincare_check: ball has no mass");
  ubar /= mass_b;

  PoincareCheck check;
  for (int i = 0; i < space.size(); ++i) {
    double d = (*row)[i];
    if (d <= radius) check.lhs += space.measure(i) * (u[i] - ubar) * (u[i] - ubar);
    if (d <= lambda * radius) check.rhs += space.measure(i) * g[i] * g[i];
  }
  check.lhs /= mass_b;
  check.rhs *= radius * radius;
  check.residual = check.lhs - c_p * check.rhs;
  check.ok = check.residual <= 1e-12 * std::max(1.0, check.lhs);
  return check;
}

}  // namespace mms
