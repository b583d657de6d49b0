#include "mms/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "mms/error.hpp"
#include "mms/parallel.hpp"

namespace mms {

void check_field(const FiniteSpace& space, const std::vector<double>& f,
                 const char* what) {
  if (static_cast<int>(f.size()) != space.size())
    fail(ErrorKind::config, std::string(what) + ": field size " +
                                std::to_string(f.size()) + " != point count " +
                                std::to_string(space.size()));
  for (double v : f)
    if (!std::isfinite(v)) fail(ErrorKind::config, std::string(what) + ": non-finite value");
}

double l2_norm(const FiniteSpace& space, const std::vector<double>& f) {
  check_field(space, f, "l2_norm");
  double s = parallel_sum(f.size(), [&](std::size_t i) {
    return space.measure(static_cast<int>(i)) * f[i] * f[i];
  });
  return std::sqrt(s);
}

double mean(const FiniteSpace& space, const std::vector<double>& f) {
  check_field(space, f, "mean");
  double s = parallel_sum(f.size(), [&](std::size_t i) {
    return space.measure(static_cast<int>(i)) * f[i];
  });
  return s / space.total_mass();
}

double l2_distance(const FiniteSpace& space, const std::vector<double>& f,
                   const std::vector<double>& g) {
  check_field(space, f, "l2_distance");
  check_field(space, g, "l2_distance");
  double s = parallel_sum(f.size(), [&](std::size_t i) {
    double d = f[i] - g[i];
    return space.measure(static_cast<int>(i)) * d * d;
  });
  return std::sqrt(s);
}

double linf_norm(const std::vector<double>& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> local_lip(const FiniteSpace& space, const std::vector<double>& f) {
  check_field(space, f, "local_lip");
  std::vector<double> out(f.size(), 0.0);
  parallel_for(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      int x = static_cast<int>(i);
      double best = 0.0;
      for (const auto* nb = space.neighbors_begin(x); nb != space.neighbors_end(x); ++nb)
        best = std::max(best, std::abs(f[x] - f[nb->to]) / nb->length);
      out[i] = best;
    }
  });
  return out;
}

double global_lip(const FiniteSpace& space, const std::vector<double>& f) {
  auto lip = local_lip(space, f);
  return *std::max_element(lip.begin(), lip.end());
}

double sobolev_norm(const FiniteSpace& space, const std::vector<double>& f,
                    const std::vector<double>& g) {
  double a = l2_norm(space, f), b = l2_norm(space, g);
  return std::sqrt(a * a + b * b);
}

double sobolev_norm(const FiniteSpace& space, const std::vector<double>& f) {
  return sobolev_norm(space, f, local_lip(space, f));
}

std::vector<double> truncate(const std::vector<double>& f, double bound) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::clamp(f[i], -bound, bound);
  return out;
}

GradientPair GradientPair::make(const FiniteSpace& space, std::vector<double> f,
                                std::vector<double> g) {
  check_field(space, f, "GradientPair.f");
  check_field(space, g, "GradientPair.g");
  for (double v : g)
    if (v < 0.0) fail(ErrorKind::config, "GradientPair: negative gradient value");
  return {std::move(f), std::move(g)};
}

CurveFamily CurveFamily::make(const FiniteSpace& space, std::vector<Curve> curves) {
  if (curves.empty()) fail(ErrorKind::config, "CurveFamily: empty");
  for (const Curve& c : curves)
    if (!curve_valid(space, c)) fail(ErrorKind::config, "CurveFamily: invalid curve");
  return {std::move(curves)};
}

double CurveFamily::compression(const FiniteSpace& space) const {
  std::vector<int> visits(space.size(), 0);
  for (const Curve& c : curves)
    for (int p : c.points) ++visits[p];
  double best = 0.0;
  const double w = 1.0 / static_cast<double>(curves.size());
  for (int i = 0; i < space.size(); ++i)
    if (visits[i] > 0) best = std::max(best, visits[i] * w / space.measure(i));
  return best;
}

double curve_integral(const FiniteSpace& space, const std::vector<double>& g,
                      const Curve& c) {
  double acc = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    int a = c.points[i - 1], b = c.points[i];
    if (a == b) continue;
    acc += 0.5 * (g[a] + g[b]) * space.distance(a, b);
  }
  return acc;
}

std::vector<char> boundary_points(const FiniteSpace& space) {
  int max_deg = 0;
  for (int i = 0; i < space.size(); ++i) max_deg = std::max(max_deg, space.degree(i));
  std::vector<char> out(space.size(), 0);
  for (int i = 0; i < space.size(); ++i)
    if (space.degree(i) < max_deg) out[i] = 1;
  return out;
}

std::vector<char> interior_mask(const FiniteSpace& space, int hops) {
  std::vector<char> boundary = boundary_points(space);
  std::vector<int> dist(space.size(), -1);
  std::vector<int> frontier;
  for (int i = 0; i < space.size(); ++i)
    if (boundary[i]) {
      dist[i] = 0;
      frontier.push_back(i);
    }
  for (int hop = 1; hop <= hops && !frontier.empty(); ++hop) {
    std::vector<int> next;
    for (int u : frontier)
      for (const auto* nb = space.neighbors_begin(u); nb != space.neighbors_end(u); ++nb)
        if (dist[nb->to] < 0) {
          dist[nb->to] = hop;
          next.push_back(nb->to);
        }
    frontier = std::move(next);
  }
  std::vector<char> out(space.size(), 0);
  for (int i = 0; i < space.size(); ++i) out[i] = dist[i] < 0;
  return out;
}

UpperGradientReport upper_gradient_violations(const FiniteSpace& space,
                                              const GradientPair& pair,
                                              const CurveFamily& family,
                                              double tol) {
  UpperGradientReport rep;
  const double w = 1.0 / static_cast<double>(family.curves.size());
  for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
    const Curve& c = family.curves[ci];
    double lhs = std::abs(pair.f[c.points.back()] - pair.f[c.points.front()]);
    double rhs = curve_integral(space, pair.g, c);
    rep.lhs += w * lhs;
    rep.rhs += w * rhs;
    if (lhs > rhs + tol) {
      rep.violating_curves.push_back(static_cast<int>(ci));
      rep.slacks.push_back(lhs - rhs);
    }
  }
  rep.per_curve_ok = rep.violating_curves.empty();
  rep.family_ok = rep.lhs <= rep.rhs + tol;
  return rep;
}

}  // namespace mms
