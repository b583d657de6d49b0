#include "mms/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "mms/error.hpp"

namespace mms {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double edge_length(const FiniteSpace& s, int a, int b) {
  for (const auto* nb = s.neighbors_begin(a); nb != s.neighbors_end(a); ++nb)
    if (nb->to == b) return nb->length;
  fail(ErrorKind::config,
       "axis_positions: points " + std::to_string(a) + " and " + std::to_string(b) +
           " are not adjacent; space is not indexed along a path/cycle");
}

double tri(double u) {
  const double v = u - std::floor(u);
  return 2.0 * std::min(v, 1.0 - v);
}
}  // namespace

std::vector<double> axis_positions(const FiniteSpace& s) {
  std::vector<double> pos(s.size(), 0.0);
  for (int i = 1; i < s.size(); ++i) pos[i] = pos[i - 1] + edge_length(s, i - 1, i);
  return pos;
}

const std::vector<std::string>& named_field_names() {
  static const std::vector<std::string> names{"sum", "product", "sincos", "crease"};
  return names;
}

bool is_named_field(const std::string& name) {
  const auto& names = named_field_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<double> named_field(const ProductSpace& p, const std::string& name) {
  const std::vector<double> px = axis_positions(p.factor_x());
  const std::vector<double> py = axis_positions(p.factor_y());
  if (name == "sum")
    return p.make_field([&](int x, int y) { return px[x] + py[y]; });
  if (name == "product")
    return p.make_field([&](int x, int y) { return px[x] * py[y]; });
  if (name == "sincos")
    return p.make_field([&](int x, int y) {
      return std::sin(kTwoPi * px[x]) * std::cos(kTwoPi * py[y]);
    });
  if (name == "crease")
    return p.make_field([&](int x, int y) { return std::abs(px[x] - py[y]); });
  fail(ErrorKind::config, "unknown named field: " + name);
}

TensorSumField trig_tensor_sum(const FiniteSpace& x, const FiniteSpace& y, Rng& rng,
                               int max_freq) {
  const std::vector<double> px = axis_positions(x);
  const std::vector<double> py = axis_positions(y);
  const int terms = 1 + static_cast<int>(rng.index(3));
  std::vector<std::vector<double>> gx, hy;
  for (int i = 0; i < terms; ++i) {
    const int a1 = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_freq)));
    const int a2 = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_freq)));
    const double p1 = rng.uniform(0.0, kTwoPi);
    const double p2 = rng.uniform(0.0, kTwoPi);
    const double c = rng.uniform(0.3, 1.5);
    std::vector<double> g(px.size()), h(py.size());
    for (std::size_t j = 0; j < px.size(); ++j)
      g[j] = c * std::sin(kTwoPi * a1 * px[j] + p1);
    for (std::size_t j = 0; j < py.size(); ++j)
      h[j] = std::sin(kTwoPi * a2 * py[j] + p2);
    gx.push_back(std::move(g));
    hy.push_back(std::move(h));
  }
  return TensorSumField::make(x, y, std::move(gx), std::move(hy));
}

std::vector<double> cascade_factor(const FiniteSpace& s, int levels, Rng& rng) {
  const std::vector<double> pos = axis_positions(s);
  std::vector<double> out(pos.size(), 0.0);
  for (int j = 0; j <= levels; ++j) {
    const double phase = rng.uniform();
    const double sign = rng.sign();
    const double scale = std::pow(2.0, static_cast<double>(j));
    for (std::size_t i = 0; i < pos.size(); ++i)
      out[i] += sign * tri(scale * pos[i] + phase) / scale;
  }
  return out;
}

TensorSumField cascade_tensor_sum(const FiniteSpace& x, const FiniteSpace& y, Rng& rng,
                                  int levels) {
  const int terms = 1 + static_cast<int>(rng.index(3));
  std::vector<std::vector<double>> gx, hy;
  for (int i = 0; i < terms; ++i) {
    std::vector<double> g = cascade_factor(x, levels, rng);
    std::vector<double> h = cascade_factor(y, levels, rng);
    const double c = rng.uniform(0.5, 1.5);
    for (double& v : g) v *= c;
    gx.push_back(std::move(g));
    hy.push_back(std::move(h));
  }
  return TensorSumField::make(x, y, std::move(gx), std::move(hy));
}

std::vector<double> random_trig_field(const FiniteSpace& s, Rng& rng, int max_freq) {
  const std::vector<double> pos = axis_positions(s);
  std::vector<double> out(pos.size(), 0.0);
  const int terms = 1 + static_cast<int>(rng.index(3));
  for (int t = 0; t < terms; ++t) {
    const int a = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_freq)));
    const double p = rng.uniform(0.0, kTwoPi);
    const double c = rng.sign() * rng.uniform(0.3, 1.5);
    for (std::size_t i = 0; i < pos.size(); ++i)
      out[i] += c * std::sin(kTwoPi * a * pos[i] + p);
  }
  return out;
}

std::vector<double> random_pl_field(const FiniteSpace& s, Rng& rng, int max_terms) {
  std::vector<double> out(static_cast<std::size_t>(s.size()), 0.0);
  const int terms = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(max_terms)));
  for (int t = 0; t < terms; ++t) {
    const int anchor = static_cast<int>(rng.index(static_cast<std::size_t>(s.size())));
    const double c = rng.uniform(-1.0, 1.0);
    auto row = s.distance_row(anchor);
    for (int i = 0; i < s.size(); ++i) out[i] += c * (*row)[i];
  }
  return out;
}

std::vector<double> random_field(const FiniteSpace& s, Rng& rng) {
  return rng.sign() > 0 ? random_trig_field(s, rng) : random_pl_field(s, rng);
}

}  // namespace mms
