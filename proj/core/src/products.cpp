#include "mms/products.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mms/calculus.hpp"
#include "mms/parallel.hpp"

namespace mms {

WarpSpec WarpSpec::make(const FiniteSpace& y, std::vector<double> wd,
                        std::vector<double> wm) {
  check_field(y, wd, "WarpSpec.wd");
  check_field(y, wm, "WarpSpec.wm");
  for (int t = 0; t < y.size(); ++t) {
    if (wd[t] < 0.0 || wm[t] < 0.0)
      fail(ErrorKind::config, "warp fields must be nonnegative");
    if (wd[t] == 0.0 && wm[t] != 0.0)
      fail(ErrorKind::hypothesis_violated,
           "w_d vanishes at point " + std::to_string(t) + " where w_m = " +
               std::to_string(wm[t]) + " > 0");
  }
  WarpSpec w{std::move(wd), std::move(wm), 0.0};
  for (const Edge& e : y.edges()) {
    w.modulus = std::max(w.modulus, std::abs(w.wd[e.u] - w.wd[e.v]) / e.length);
    w.modulus = std::max(w.modulus, std::abs(w.wm[e.u] - w.wm[e.v]) / e.length);
  }
  return w;
}

void check_product_field(const ProductSpace& p, const std::vector<double>& f,
                         const char* what) {
  if (static_cast<int>(f.size()) != p.size())
    fail(ErrorKind::config, std::string(what) + ": field size " +
                                std::to_string(f.size()) + " != node count " +
                                std::to_string(p.size()));
}

ProductSpace ProductSpace::cartesian(FiniteSpace x, FiniteSpace y,
                                     std::int64_t size_cap) {
  ProductSpace p;
  p.kind_ = Kind::cartesian;
  p.x_ = std::move(x);
  p.y_ = std::move(y);
  if (p.pair_count() > size_cap)
    fail(ErrorKind::too_large, "product has " + std::to_string(p.pair_count()) +
                                   " pairs (cap " + std::to_string(size_cap) + ")");
  return p;
}

namespace {

int uf_find(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

void uf_union(std::vector<int>& parent, int a, int b) {
  a = uf_find(parent, a);
  b = uf_find(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

}  // namespace

ProductSpace ProductSpace::warped(FiniteSpace x, FiniteSpace y, WarpSpec warp,
                                  const WarpedOptions& opt, std::int64_t size_cap) {
  if (static_cast<int>(warp.wd.size()) != y.size())
    fail(ErrorKind::config, "warp spec built for a different Y");
  for (auto [a, b] : opt.skew_offsets)
    if (a < 0 || b < 0 || a + b < 1)
      fail(ErrorKind::config, "skew offset hops must be nonnegative, not both zero");

  ProductSpace p;
  p.kind_ = Kind::warped;
  p.x_ = std::move(x);
  p.y_ = std::move(y);
  p.warp_ = std::move(warp);
  if (p.pair_count() > size_cap)
    fail(ErrorKind::too_large, "product has " + std::to_string(p.pair_count()) +
                                   " pairs (cap " + std::to_string(size_cap) + ")");

  const FiniteSpace& X = p.x_;
  const FiniteSpace& Y = p.y_;
  const std::vector<double>& wd = p.warp_.wd;
  const std::vector<double>& wm = p.warp_.wm;
  const int ny = Y.size();
  const int npairs = static_cast<int>(p.pair_count());
  auto pid = [ny](int xi, int yi) { return xi * ny + yi; };

  // collapse: each fiber over a zero of w_d becomes one point (zero-length
  // X-edges; X is connected, so the whole fiber joins)
  std::vector<int> parent(npairs);
  std::iota(parent.begin(), parent.end(), 0);
  for (int t = 0; t < ny; ++t)
    if (wd[t] == 0.0)
      for (int xi = 1; xi < X.size(); ++xi)
        uf_union(parent, pid(0, t), pid(xi, t));

  p.collapse_.assign(npairs, -1);
  int nodes = 0;
  for (int q = 0; q < npairs; ++q) {
    int r = uf_find(parent, q);
    if (p.collapse_[r] < 0) p.collapse_[r] = nodes++;
    p.collapse_[q] = p.collapse_[r];
  }

  std::vector<double> measures(nodes, 0.0);
  for (int xi = 0; xi < X.size(); ++xi)
    for (int t = 0; t < ny; ++t)
      measures[p.collapse_[pid(xi, t)]] += wm[t] * Y.measure(t) * X.measure(xi);

  // edge families on quotient nodes
  std::vector<Edge> raw;
  auto add = [&](int qa, int qb, double len) {
    int a = p.collapse_[qa], b = p.collapse_[qb];
    if (a == b) return;
    if (a > b) std::swap(a, b);
    raw.push_back({a, b, len});
  };

  for (const Edge& ey : Y.edges())  // Y-edges
    for (int xi = 0; xi < X.size(); ++xi)
      add(pid(xi, ey.u), pid(xi, ey.v), ey.length);

  for (const Edge& ex : X.edges())  // X-edges at fixed t, scaled by w_d(t)
    for (int t = 0; t < ny; ++t)
      if (wd[t] > 0.0) add(pid(ex.u, t), pid(ex.v, t), wd[t] * ex.length);

  for (const Edge& ex : X.edges())  // unit diagonals
    for (const Edge& ey : Y.edges()) {
      double wbar = 0.5 * (wd[ey.u] + wd[ey.v]);
      double len = std::hypot(ey.length, wbar * ex.length);
      add(pid(ex.u, ey.u), pid(ex.v, ey.v), len);
      add(pid(ex.u, ey.v), pid(ex.v, ey.u), len);
    }

  if (!opt.skew_offsets.empty()) {
    int max_a = 0, max_b = 0;
    for (auto [a, b] : opt.skew_offsets) {
      max_a = std::max(max_a, a);
      max_b = std::max(max_b, b);
    }
    std::vector<std::vector<FiniteSpace::HopSet>> hop_x(X.size()), hop_y(ny);
    for (int xi = 0; xi < X.size(); ++xi)
      if (max_a > 0) hop_x[xi] = X.hop_neighborhoods(xi, max_a);
    for (int t = 0; t < ny; ++t)
      if (max_b > 0) hop_y[t] = Y.hop_neighborhoods(t, max_b);

    for (int xi = 0; xi < X.size(); ++xi)
      for (int t = 0; t < ny; ++t)
        for (auto [a, b] : opt.skew_offsets) {
          if (a == 0) {
            for (std::size_t j = 0; j < hop_y[t][b - 1].points.size(); ++j)
              add(pid(xi, t), pid(xi, hop_y[t][b - 1].points[j]),
                  hop_y[t][b - 1].dists[j]);
          } else if (b == 0) {
            if (wd[t] == 0.0) continue;
            for (std::size_t i = 0; i < hop_x[xi][a - 1].points.size(); ++i)
              add(pid(xi, t), pid(hop_x[xi][a - 1].points[i], t),
                  wd[t] * hop_x[xi][a - 1].dists[i]);
          } else {
            const auto& hx = hop_x[xi][a - 1];
            const auto& hy = hop_y[t][b - 1];
            for (std::size_t i = 0; i < hx.points.size(); ++i)
              for (std::size_t j = 0; j < hy.points.size(); ++j) {
                int s = hy.points[j];
                double wbar = 0.5 * (wd[t] + wd[s]);
                add(pid(xi, t), pid(hx.points[i], s),
                    std::hypot(hy.dists[j], wbar * hx.dists[i]));
              }
          }
        }
  }

  // dedup parallel edges keeping the shortest
  std::sort(raw.begin(), raw.end(), [](const Edge& a, const Edge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.length < b.length;
  });
  std::vector<Edge> edges;
  edges.reserve(raw.size() / 2);
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (i == 0 || raw[i].u != raw[i - 1].u || raw[i].v != raw[i - 1].v)
      edges.push_back(raw[i]);
  raw.clear();
  raw.shrink_to_fit();

  std::ostringstream name;
  name << "warped(" << p.x_.name() << "," << p.y_.name() << ")";
  p.quotient_ = FiniteSpace::build(std::move(measures), std::move(edges),
                                   name.str(), /*allow_zero_measure=*/true);
  return p;
}

const WarpSpec& ProductSpace::warp() const {
  if (!is_warped()) fail(ErrorKind::config, "cartesian product has no warp spec");
  return warp_;
}

const FiniteSpace& ProductSpace::graph() const {
  if (!is_warped()) fail(ErrorKind::config, "cartesian product has no materialized graph");
  return quotient_;
}

int ProductSpace::size() const {
  return is_warped() ? quotient_.size() : static_cast<int>(pair_count());
}

int ProductSpace::node(int x, int y) const {
  int q = pair_id(x, y);
  return is_warped() ? collapse_[q] : q;
}

double ProductSpace::measure(int node) const {
  if (is_warped()) return quotient_.measure(node);
  return x_.measure(x_of(node)) * y_.measure(y_of(node));
}

double ProductSpace::total_mass() const {
  if (is_warped()) return quotient_.total_mass();
  return x_.total_mass() * y_.total_mass();
}

double ProductSpace::distance(int node_a, int node_b) const {
  if (is_warped()) return quotient_.distance(node_a, node_b);
  return std::hypot(x_.distance(x_of(node_a), x_of(node_b)),
                    y_.distance(y_of(node_a), y_of(node_b)));
}

std::vector<double> ProductSpace::distance_row(int node) const {
  if (is_warped()) return *quotient_.distance_row(node);
  auto rx = x_.distance_row(x_of(node));
  auto ry = y_.distance_row(y_of(node));
  std::vector<double> out(pair_count());
  const int ny = y_.size();
  parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q)
      out[q] = std::hypot((*rx)[static_cast<int>(q) / ny],
                          (*ry)[static_cast<int>(q) % ny]);
  });
  return out;
}

FiniteSpace rescale_space(const FiniteSpace& space, double metric_factor,
                          double measure_factor) {
  if (!(metric_factor > 0.0) || !(measure_factor > 0.0))
    fail(ErrorKind::config, "rescale factors must be positive");
  std::vector<double> mu(space.size());
  for (int i = 0; i < space.size(); ++i) mu[i] = space.measure(i) * measure_factor;
  std::vector<Edge> edges = space.edges();
  for (Edge& e : edges) e.length /= metric_factor;
  return FiniteSpace::build(std::move(mu), std::move(edges),
                            space.name() + "[rescaled]");
}

WarpSpec localize_warp(const FiniteSpace& y, const WarpSpec& w, int t0,
                       double delta, double eps) {
  if (t0 < 0 || t0 >= y.size()) fail(ErrorKind::config, "localize_warp: bad center");
  if (w.wd[t0] == 0.0)
    fail(ErrorKind::zero_warp_center, "w_d vanishes at the localization center");

  auto row = y.distance_row(t0);
  if (delta <= 0.0) {
    // largest 3*delta such that max/min of w_d over B(t0, 3*delta) <= 1+eps
    std::vector<int> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return (*row)[a] < (*row)[b]; });
    double lo = w.wd[t0], hi = w.wd[t0], best = 0.0;
    for (std::size_t i = 0; i < order.size();) {
      double r = (*row)[order[i]];
      for (; i < order.size() && (*row)[order[i]] == r; ++i) {
        lo = std::min(lo, w.wd[order[i]]);
        hi = std::max(hi, w.wd[order[i]]);
      }
      if (lo <= 0.0 || hi > (1.0 + eps) * lo) break;
      best = r;
    }
    delta = best / 3.0;
  }

  std::vector<double> wd(y.size()), wm(y.size());
  for (int t = 0; t < y.size(); ++t) {
    double d = (*row)[t];
    if (d <= 2.0 * delta) {
      wd[t] = w.wd[t];
      wm[t] = w.wm[t];
    } else if (d >= 3.0 * delta) {
      wd[t] = w.wd[t0];
      wm[t] = w.wm[t0];
    } else {
      double lam = (3.0 * delta - d) / delta;
      wd[t] = lam * w.wd[t] + (1.0 - lam) * w.wd[t0];
      wm[t] = lam * w.wm[t] + (1.0 - lam) * w.wm[t0];
    }
  }
  return WarpSpec::make(y, std::move(wd), std::move(wm));
}

namespace {

// direction-dense stencil: coprime hop offsets within Chebyshev radius max_hops
std::vector<std::pair<int, int>> stencil_offsets(int max_hops) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a <= max_hops; ++a)
    for (int b = 0; b <= max_hops; ++b)
      if (a + b >= 1 && std::gcd(a, b) == 1) out.emplace_back(a, b);
  return out;
}

}  // namespace

std::vector<double> product_local_lip(const ProductSpace& p,
                                      const std::vector<double>& f, int max_hops) {
  check_product_field(p, f, "product_local_lip");
  if (p.is_warped()) return local_lip(p.graph(), f);

  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int ny = Y.size();
  const auto offsets = stencil_offsets(max_hops);
  std::vector<std::vector<FiniteSpace::HopSet>> hop_x(X.size()), hop_y(ny);
  for (int xi = 0; xi < X.size(); ++xi) hop_x[xi] = X.hop_neighborhoods(xi, max_hops);
  for (int t = 0; t < ny; ++t) hop_y[t] = Y.hop_neighborhoods(t, max_hops);

  std::vector<double> out(p.size(), 0.0);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
      const double f0 = f[q];
      double best = 0.0;
      for (auto [a, b] : offsets) {
        if (b == 0) {
          const auto& hx = hop_x[xi][a - 1];
          for (std::size_t i = 0; i < hx.points.size(); ++i)
            best = std::max(best,
                            std::abs(f[p.pair_id(hx.points[i], t)] - f0) / hx.dists[i]);
        } else if (a == 0) {
          const auto& hy = hop_y[t][b - 1];
          for (std::size_t j = 0; j < hy.points.size(); ++j)
            best = std::max(best,
                            std::abs(f[p.pair_id(xi, hy.points[j])] - f0) / hy.dists[j]);
        } else {
          const auto& hx = hop_x[xi][a - 1];
          const auto& hy = hop_y[t][b - 1];
          for (std::size_t i = 0; i < hx.points.size(); ++i)
            for (std::size_t j = 0; j < hy.points.size(); ++j)
              best = std::max(best,
                              std::abs(f[p.pair_id(hx.points[i], hy.points[j])] - f0) /
                                  std::hypot(hx.dists[i], hy.dists[j]));
        }
      }
      out[q] = best;
    }
  });
  return out;
}

std::vector<double> bl_gradient(const ProductSpace& p, const std::vector<double>& f) {
  check_product_field(p, f, "bl_gradient");
  const FiniteSpace& X = p.factor_x();
  const FiniteSpace& Y = p.factor_y();
  const int ny = Y.size();
  std::vector<double> out(p.size(), 0.0);

  if (!p.is_warped()) {
    parallel_for(p.pair_count(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t q = begin; q < end; ++q) {
        const int xi = static_cast<int>(q) / ny, t = static_cast<int>(q) % ny;
        const double f0 = f[q];
        double lx = 0.0, ly = 0.0;
        for (const auto* nb = X.neighbors_begin(xi); nb != X.neighbors_end(xi); ++nb)
          lx = std::max(lx, std::abs(f[p.pair_id(nb->to, t)] - f0) / nb->length);
        for (const auto* nb = Y.neighbors_begin(t); nb != Y.neighbors_end(t); ++nb)
          ly = std::max(ly, std::abs(f[p.pair_id(xi, nb->to)] - f0) / nb->length);
        out[q] = std::hypot(lx, ly);
      }
    });
    return out;
  }

  const std::vector<double>& wd = p.warp().wd;
  const std::vector<double>& wm = p.warp().wm;
  // per-pair evaluation scattered to nodes by max; only collapsed (zero
  // measure) nodes receive more than one pair
  for (int xi = 0; xi < X.size(); ++xi)
    for (int t = 0; t < ny; ++t) {
      const int nid = p.node(xi, t);
      const double f0 = f[nid];
      double lx = 0.0, ly = 0.0;
      for (const auto* nb = Y.neighbors_begin(t); nb != Y.neighbors_end(t); ++nb)
        ly = std::max(ly, std::abs(f[p.node(xi, nb->to)] - f0) / nb->length);
      if (wd[t] > 0.0) {
        for (const auto* nb = X.neighbors_begin(xi); nb != X.neighbors_end(xi); ++nb)
          lx = std::max(lx, std::abs(f[p.node(nb->to, t)] - f0) / nb->length);
        lx /= wd[t];
      } else if (wm[t] != 0.0) {
        fail(ErrorKind::hypothesis_violated,
             "X-partial undefined: w_d = 0 < w_m at y-point " + std::to_string(t));
      }
      out[nid] = std::max(out[nid], std::hypot(lx, ly));
    }
  return out;
}

}  // namespace mms
