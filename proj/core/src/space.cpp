#include "mms/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "mms/parallel.hpp"

namespace mms {

FiniteSpace FiniteSpace::build(std::vector<double> measures, std::vector<Edge> edges,
                               std::string name, bool allow_zero_measure) {
  const int n = static_cast<int>(measures.size());
  if (n < 1) fail(ErrorKind::config, "space needs at least one point");
  for (int i = 0; i < n; ++i) {
    if (!(measures[i] >= 0.0) || (!allow_zero_measure && measures[i] == 0.0))
      fail(ErrorKind::config, "point " + std::to_string(i) + " has non-positive measure");
  }
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
      fail(ErrorKind::config, "edge endpoints out of range or equal");
    if (!(e.length > 0.0))
      fail(ErrorKind::config, "edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + ") has non-positive length");
  }

  FiniteSpace s;
  s.name_ = std::move(name);
  s.measures_ = std::move(measures);
  s.edges_ = std::move(edges);

  // CSR adjacency, parallel edges reduced to the shortest
  struct Directed {
    int from, to;
    double len;
  };
  std::vector<Directed> dir;
  dir.reserve(2 * s.edges_.size());
  for (const Edge& e : s.edges_) {
    dir.push_back({e.u, e.v, e.length});
    dir.push_back({e.v, e.u, e.length});
  }
  std::sort(dir.begin(), dir.end(), [](const Directed& a, const Directed& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.len < b.len;
  });
  s.offsets_.assign(n + 1, 0);
  s.adj_.reserve(dir.size());
  for (std::size_t i = 0; i < dir.size(); ++i) {
    if (i > 0 && dir[i].from == dir[i - 1].from && dir[i].to == dir[i - 1].to)
      continue;  // parallel edge, keep the shortest (first after sort)
    s.adj_.push_back({dir[i].to, dir[i].len});
    ++s.offsets_[dir[i].from + 1];
  }
  for (int i = 0; i < n; ++i) s.offsets_[i + 1] += s.offsets_[i];

  s.h_ = 0.0;
  for (const Edge& e : s.edges_) s.h_ = std::max(s.h_, e.length);
  s.total_mass_ = 0.0;
  for (double m : s.measures_) s.total_mass_ += m;

  // connectivity
  if (n > 1) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const Neighbor* nb = s.neighbors_begin(u); nb != s.neighbors_end(u); ++nb)
        if (!seen[nb->to]) {
          seen[nb->to] = 1;
          ++count;
          stack.push_back(nb->to);
        }
    }
    if (count != n)
      fail(ErrorKind::disconnected,
           "graph has " + std::to_string(n - count) + " unreachable points");
  }
  return s;
}

FiniteSpace FiniteSpace::interval(double length, int n) {
  if (n < 2 || !(length > 0.0)) fail(ErrorKind::config, "interval needs n >= 2, length > 0");
  const double h = length / (n - 1);
  std::vector<double> mu(n, length / n);
  std::vector<Edge> edges(n - 1);
  for (int i = 0; i + 1 < n; ++i) edges[i] = {i, i + 1, h};
  std::ostringstream name;
  name << "interval(" << length << "," << n << ")";
  return build(std::move(mu), std::move(edges), name.str());
}

FiniteSpace FiniteSpace::circle(double length, int n) {
  if (n < 3 || !(length > 0.0)) fail(ErrorKind::config, "circle needs n >= 3, length > 0");
  const double h = length / n;
  std::vector<double> mu(n, h);
  std::vector<Edge> edges(n);
  for (int i = 0; i < n; ++i) edges[i] = {i, (i + 1) % n, h};
  std::ostringstream name;
  name << "circle(" << length << "," << n << ")";
  return build(std::move(mu), std::move(edges), name.str());
}

FiniteSpace FiniteSpace::load(std::istream& in, std::string name) {
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::io, "line " + std::to_string(lineno) + ": " + what);
  };

  int n = -1;
  std::vector<double> measures;
  std::vector<Edge> edges;
  std::vector<char> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      std::string magic, version;
      if (!(ls >> magic >> version >> n) || magic != "mms" || version != "v1" || n < 1)
        bad("expected header 'mms v1 <n>'");
      measures.assign(n, -1.0);
      seen.assign(n, 0);
      continue;
    }
    char tag;
    if (!(ls >> tag)) bad("unreadable record");
    if (tag == 'P') {
      int i;
      double m;
      if (!(ls >> i >> m) || i < 0 || i >= n) bad("bad point record");
      if (seen[i]) bad("duplicate point " + std::to_string(i));
      if (!(m > 0.0)) bad("non-positive measure");
      measures[i] = m;
      seen[i] = 1;
    } else if (tag == 'E') {
      int i, j;
      double len;
      if (!(ls >> i >> j >> len) || i < 0 || i >= n || j < 0 || j >= n || i == j)
        bad("bad edge record");
      if (!(len > 0.0)) bad("non-positive edge length");
      edges.push_back({i, j, len});
    } else {
      bad(std::string("unknown record tag '") + tag + "'");
    }
  }
  if (n < 0) fail(ErrorKind::io, "empty space file");
  for (int i = 0; i < n; ++i)
    if (!seen[i]) fail(ErrorKind::io, "missing P record for point " + std::to_string(i));
  return build(std::move(measures), std::move(edges), std::move(name));
}

FiniteSpace FiniteSpace::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  return load(in, path);
}

void FiniteSpace::save(std::ostream& out) const {
  out << "mms v1 " << size() << "\n";
  char buf[64];
  for (int i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", measures_[i]);
    out << "P " << i << " " << buf << "\n";
  }
  for (const Edge& e : edges_) {
    std::snprintf(buf, sizeof buf, "%.17g", e.length);
    out << "E " << e.u << " " << e.v << " " << buf << "\n";
  }
}

std::vector<double> FiniteSpace::dijkstra(int src) const {
  std::vector<double> dist(size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Neighbor* nb = neighbors_begin(u); nb != neighbors_end(u); ++nb) {
      double nd = d + nb->length;
      if (nd < dist[nb->to]) {
        dist[nb->to] = nd;
        heap.push({nd, nb->to});
      }
    }
  }
  return dist;
}

std::shared_ptr<const std::vector<double>> FiniteSpace::distance_row(int src) const {
  if (src < 0 || src >= size()) fail(ErrorKind::config, "distance_row: bad source");
  if (size() <= kDenseCap) {
    {
      std::lock_guard<std::mutex> lock(cache_->mutex);
      auto it = cache_->rows.find(src);
      if (it != cache_->rows.end()) return it->second;
    }
    auto row = std::make_shared<const std::vector<double>>(dijkstra(src));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->rows.try_emplace(src, std::move(row)).first->second;
  }
  return std::make_shared<const std::vector<double>>(dijkstra(src));
}

double FiniteSpace::distance(int i, int j) const {
  if (i == j) return 0.0;
  return (*distance_row(i))[j];
}

double FiniteSpace::diameter() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->diameter >= 0.0) return cache_->diameter;
  }
  auto [best, arg] = parallel_max(static_cast<std::size_t>(size()), [&](std::size_t i) {
    auto row = distance_row(static_cast<int>(i));
    return *std::max_element(row->begin(), row->end());
  });
  (void)arg;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->diameter = best;
  return cache_->diameter;
}

std::vector<int> FiniteSpace::ball(int center, double r) const {
  if (r < 0.0) fail(ErrorKind::config, "ball: negative radius");
  auto row = distance_row(center);
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if ((*row)[i] <= r) out.push_back(i);
  return out;
}

double FiniteSpace::ball_measure(int center, double r) const {
  auto row = distance_row(center);
  double m = 0.0;
  for (int i = 0; i < size(); ++i)
    if ((*row)[i] <= r) m += measures_[i];
  return m;
}

std::vector<FiniteSpace::HopSet> FiniteSpace::hop_neighborhoods(int src, int max_hops) const {
  // Bellman-Ford sweep limited to max_hops relaxations: after sweep h, dist[v]
  // is the shortest length among paths of at most h hops. Points are grouped
  // by the first sweep that reaches them; distances reported at the end are
  // the max_hops-limited optima.
  std::vector<double> dist(size(), std::numeric_limits<double>::infinity());
  std::vector<int> first_hop(size(), -1);
  dist[src] = 0.0;
  first_hop[src] = 0;
  std::vector<HopSet> out(max_hops);
  std::vector<double> next = dist;
  for (int hop = 1; hop <= max_hops; ++hop) {
    for (int u = 0; u < size(); ++u) {
      if (std::isinf(dist[u])) continue;
      for (const Neighbor* nb = neighbors_begin(u); nb != neighbors_end(u); ++nb) {
        double nd = dist[u] + nb->length;
        if (nd < next[nb->to]) {
          next[nb->to] = nd;
          if (first_hop[nb->to] < 0) first_hop[nb->to] = hop;
        }
      }
    }
    dist = next;
    for (int v = 0; v < size(); ++v)
      if (first_hop[v] == hop) out[hop - 1].points.push_back(v);
  }
  for (int hop = 1; hop <= max_hops; ++hop) {
    out[hop - 1].dists.reserve(out[hop - 1].points.size());
    for (int v : out[hop - 1].points) out[hop - 1].dists.push_back(dist[v]);
  }
  return out;
}

Curve Curve::through(std::vector<int> pts) {
  Curve c;
  c.points = std::move(pts);
  const std::size_t n = c.points.size();
  c.params.resize(n);
  if (n == 1) {
    c.params[0] = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      c.params[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return c;
}

bool curve_valid(const FiniteSpace& space, const Curve& c) {
  if (c.points.empty() || c.points.size() != c.params.size()) return false;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    if (c.points[i] < 0 || c.points[i] >= space.size()) return false;
    if (i > 0 && c.params[i] < c.params[i - 1]) return false;
  }
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    int a = c.points[i - 1], b = c.points[i];
    if (a == b) continue;
    bool adjacent = false;
    for (const auto* nb = space.neighbors_begin(a); nb != space.neighbors_end(a); ++nb)
      if (nb->to == b) { adjacent = true; break; }
    if (!adjacent) return false;
  }
  return true;
}

double curve_length(const FiniteSpace& space, const Curve& c) {
  double len = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    if (c.points[i] != c.points[i - 1])
      len += space.distance(c.points[i - 1], c.points[i]);
  return len;
}

std::vector<double> metric_derivative(const FiniteSpace& space, const Curve& c) {
  std::vector<double> speed;
  speed.reserve(c.points.size() > 0 ? c.points.size() - 1 : 0);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    double dt = c.params[i] - c.params[i - 1];
    double d = c.points[i] == c.points[i - 1]
                   ? 0.0
                   : space.distance(c.points[i - 1], c.points[i]);
    speed.push_back(dt > 0.0 ? d / dt : 0.0);
  }
  return speed;
}

FiniteSpace make_space(const std::string& spec) {
  auto open = spec.find('(');
  auto close = spec.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    fail(ErrorKind::config, "bad generator spec '" + spec + "' (want name(L,n))");
  std::string kind = spec.substr(0, open);
  std::string args = spec.substr(open + 1, close - open - 1);
  std::replace(args.begin(), args.end(), ',', ' ');
  std::istringstream as(args);
  double length = 0.0;
  int n = 0;
  if (!(as >> length >> n)) fail(ErrorKind::config, "bad generator arguments in '" + spec + "'");
  std::string trail;
  if (as >> trail) fail(ErrorKind::config, "trailing arguments in '" + spec + "'");
  if (kind == "interval") return FiniteSpace::interval(length, n);
  if (kind == "circle") return FiniteSpace::circle(length, n);
  fail(ErrorKind::config, "unknown generator '" + kind + "'");
}

}  // namespace mms
