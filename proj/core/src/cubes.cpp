#include "mms/cubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "mms/calculus.hpp"

namespace mms {

std::vector<int> build_net(const FiniteSpace& space, double sep) {
  if (!(sep > 0.0)) fail(ErrorKind::config, "build_net: sep must be positive");
  std::vector<int> centers;
  std::vector<std::shared_ptr<const std::vector<double>>> rows;
  for (int p = 0; p < space.size(); ++p) {
    bool keep = true;
    for (const auto& row : rows)
      if ((*row)[p] <= sep) {
        keep = false;
        break;
      }
    if (keep) {
      centers.push_back(p);
      rows.push_back(space.distance_row(p));
    }
  }
  return centers;
}

CubePartition build_cubes(const FiniteSpace& space, int k) {
  if (k < 1) fail(ErrorKind::config, "build_cubes: k must be >= 1");
  const double scale = 1.0 / k;
  if (!(scale > 4.0 * space.resolution()))
    fail(ErrorKind::scale_unresolvable,
         "1/k = " + std::to_string(scale) + " must exceed 4h = " +
             std::to_string(4.0 * space.resolution()));

  CubePartition part;
  part.k = k;
  part.centers = build_net(space, scale);
  const int m = static_cast<int>(part.centers.size());

  std::vector<std::shared_ptr<const std::vector<double>>> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = space.distance_row(part.centers[i]);

  part.assignment.assign(space.size(), -1);
  part.members.assign(m, {});
  for (int p = 0; p < space.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < m; ++i)
      if ((*rows[i])[p] < best) {
        best = (*rows[i])[p];
        arg = i;  // ties keep the smaller cube id
      }
    part.assignment[p] = arg;
    part.members[arg].push_back(p);
  }

  // set-distance: dist(Q_i, Q_j) = min over members; neighbors iff < 1/k
  std::vector<std::vector<double>> cube_dist(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) cube_dist[i][j] = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i)
    for (int p : part.members[i]) {
      auto row = space.distance_row(p);
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        for (int q : part.members[j])
          cube_dist[i][j] = std::min(cube_dist[i][j], (*row)[q]);
      }
    }
  part.neighbors.assign(m, {});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && cube_dist[i][j] < scale) part.neighbors[i].push_back(j);
  return part;
}

PartitionOfUnity partition_of_unity(const FiniteSpace& space, const CubePartition& p) {
  const int m = static_cast<int>(p.centers.size());
  const double outer = 5.0 / (4.0 * p.k);
  const double inner = 1.0 / (3.0 * p.k);

  PartitionOfUnity pou;
  pou.k = p.k;
  pou.chi.assign(m, std::vector<double>(space.size(), 0.0));
  std::vector<double> total(space.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    auto row = space.distance_row(p.centers[i]);
    for (int t = 0; t < space.size(); ++t) {
      double phi = std::clamp((outer - (*row)[t]) / (outer - inner), 0.0, 1.0);
      pou.chi[i][t] = phi;
      total[t] += phi;
    }
  }
  pou.cover_min = *std::min_element(total.begin(), total.end());
  for (int t = 0; t < space.size(); ++t)
    if (total[t] <= 0.0)
      fail(ErrorKind::cover_gap, "bump sum vanished at point " + std::to_string(t));
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < space.size(); ++t) pou.chi[i][t] /= total[t];

  for (int i = 0; i < m; ++i) {
    pou.c1 = std::max(pou.c1, global_lip(space, pou.chi[i]) / p.k);
    auto row = space.distance_row(p.centers[i]);
    for (int t = 0; t < space.size(); ++t)
      if ((*row)[t] <= inner)
        pou.inner_ball_deviation =
            std::max(pou.inner_ball_deviation, std::abs(pou.chi[i][t] - 1.0));
  }
  return pou;
}

PartitionChecks verify_partition(const FiniteSpace& space, const CubePartition& p,
                                 const PartitionOfUnity& pou, double metric_c) {
  const int m = static_cast<int>(p.centers.size());
  const double scale = 1.0 / p.k;
  const double outer = 5.0 / (4.0 * p.k) + space.resolution();
  const double inner = 1.0 / (3.0 * p.k);

  PartitionChecks c;

  bool total = static_cast<int>(p.assignment.size()) == space.size() &&
               static_cast<int>(p.members.size()) == m;
  std::vector<int> seen(space.size(), 0);
  for (int i = 0; i < m && total; ++i)
    for (int q : p.members[i]) {
      if (q < 0 || q >= space.size() || p.assignment[q] != i) {
        total = false;
        break;
      }
      ++seen[q];
    }
  if (total)
    for (int q = 0; q < space.size(); ++q) total = total && seen[q] == 1;
  c.total = total;

  std::vector<std::shared_ptr<const std::vector<double>>> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = space.distance_row(p.centers[i]);

  c.separation = true;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (!((*rows[i])[p.centers[j]] > scale)) c.separation = false;

  c.inner_ball = true;
  c.outer_ball = true;
  for (int q = 0; q < space.size(); ++q) {
    if ((*rows[p.assignment[q]])[q] > outer) c.outer_ball = false;
    for (int i = 0; i < m; ++i)
      if (i != p.assignment[q] && (*rows[i])[q] <= inner) c.inner_ball = false;
  }

  c.neighbor_count = true;
  c.neighbor_dist = true;
  const double cap = std::pow(metric_c, 3.0);
  for (int i = 0; i < m; ++i) {
    c.max_neighbors = std::max(c.max_neighbors,
                               static_cast<int>(p.neighbors[i].size()));
    if (static_cast<double>(p.neighbors[i].size()) > cap) c.neighbor_count = false;
    for (int j : p.neighbors[i])
      if (!((*rows[i])[p.centers[j]] <= 4.0 * scale)) c.neighbor_dist = false;
  }

  c.chi_range = true;
  c.chi_support = true;
  for (int q = 0; q < space.size(); ++q) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = pou.chi[i][q];
      s += v;
      if (v < 0.0 || v > 1.0 + 1e-15) c.chi_range = false;
      if (v > 0.0 && (*rows[i])[q] > outer) c.chi_support = false;
    }
    c.chi_sum_deviation = std::max(c.chi_sum_deviation, std::abs(s - 1.0));
  }
  c.chi_sum = c.chi_sum_deviation <= 1e-12;
  return c;
}

void dump_partition(std::ostream& out, const CubePartition& p, const PartitionOfUnity& pou) {
  nlohmann::json j;
  j["k"] = p.k;
  j["centers"] = p.centers;
  j["assignment"] = p.assignment;
  j["neighbors"] = p.neighbors;
  j["c1_measured"] = pou.c1;
  j["inner_ball_deviation"] = pou.inner_ball_deviation;
  out << j.dump(2) << "\n";
}

}  // namespace mms
