#pragma once

#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mms/error.hpp"

namespace mms {

struct Edge {
  int u = 0, v = 0;
  double length = 0.0;
};

// A finite metric measure space: a connected weighted graph with a strictly
// positive point measure, carrying its shortest-path metric. Immutable after
// construction; all queries are const and thread-safe.
class FiniteSpace {
public:
  // Validates: n >= 1, measures > 0 (zero allowed only when explicitly
  // permitted by the caller, e.g. collapsed warped fibers), lengths > 0,
  // connectivity. Throws Error(disconnected) / Error(config).
  static FiniteSpace build(std::vector<double> measures, std::vector<Edge> edges,
                           std::string name = {}, bool allow_zero_measure = false);

  // Path graph over [0, L]: n points at spacing h = L/(n-1), uniform
  // measure L/n per point (total mass exactly L).
  static FiniteSpace interval(double length, int n);

  // Cycle graph of circumference L: n points at spacing L/n, uniform measure.
  static FiniteSpace circle(double length, int n);

  // Text format: "mms v1 <n>" header, then "P <index> <measure>" per point,
  // then "E <i> <j> <length>" per edge.
  static FiniteSpace load(std::istream& in, std::string name = {});
  static FiniteSpace load_file(const std::string& path);
  void save(std::ostream& out) const;

  int size() const { return static_cast<int>(measures_.size()); }
  double measure(int i) const { return measures_[i]; }
  double total_mass() const { return total_mass_; }
  double resolution() const { return h_; }  // max edge length
  const std::string& name() const { return name_; }
  const std::vector<Edge>& edges() const { return edges_; }

  struct Neighbor {
    int to;
    double length;
  };
  // CSR adjacency
  const Neighbor* neighbors_begin(int i) const { return adj_.data() + offsets_[i]; }
  const Neighbor* neighbors_end(int i) const { return adj_.data() + offsets_[i + 1]; }
  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }

  // Shortest-path distances from src to every point. Rows are cached for
  // spaces with size() <= dense_cap (default 5000); larger spaces compute
  // rows on demand without retaining them.
  std::shared_ptr<const std::vector<double>> distance_row(int src) const;
  double distance(int i, int j) const;
  double diameter() const;  // max pairwise distance, cached after first call

  std::vector<int> ball(int center, double r) const;  // closed ball, sorted
  double ball_measure(int center, double r) const;

  // Points at hop-distance exactly 1..max_hops from src, with their
  // accumulated shortest path length restricted to <= max_hops hops.
  struct HopSet {
    std::vector<int> points;
    std::vector<double> dists;
  };
  std::vector<HopSet> hop_neighborhoods(int src, int max_hops) const;

  static constexpr int kDenseCap = 5000;

private:
  friend class ProductSpace;  // holds placeholder members before assignment
  FiniteSpace() = default;
  std::vector<double> dijkstra(int src) const;

  std::string name_;
  std::vector<double> measures_;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<Neighbor> adj_;
  double h_ = 0.0;
  double total_mass_ = 0.0;

  // Copies of a space share the cache; the space itself is immutable.
  struct DistCache {
    std::mutex mutex;
    std::unordered_map<int, std::shared_ptr<const std::vector<double>>> rows;
    double diameter = -1.0;
  };
  std::shared_ptr<DistCache> cache_ = std::make_shared<DistCache>();
};

// A discrete curve: a point sequence where consecutive points coincide or are
// adjacent, with a nondecreasing parameter grid in [0,1].
struct Curve {
  std::vector<int> points;
  std::vector<double> params;  // same size as points; defaults to uniform

  static Curve through(std::vector<int> pts);
};

bool curve_valid(const FiniteSpace& space, const Curve& c);
double curve_length(const FiniteSpace& space, const Curve& c);
// Speed on each parameter segment [t_{i-1}, t_i]: d(p_{i-1}, p_i)/(t_i - t_{i-1}).
std::vector<double> metric_derivative(const FiniteSpace& space, const Curve& c);

// Generator spec strings: "interval(L,n)" or "circle(L,n)"; used by the CLI
// and scenario configs. Throws Error(config) on parse failure.
FiniteSpace make_space(const std::string& generator_spec);

}  // namespace mms
