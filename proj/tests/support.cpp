#include "support.hpp"

#include <algorithm>
#include <cmath>

#include "mms/calculus.hpp"
#include "mms/corpus.hpp"
#include "mms/products.hpp"

namespace mms::testsupport {

IdentitySuite identity_suites(const FiniteSpace& space, Rng& rng, int pairs) {
  IdentitySuite out;
  out.worst_product_slack = -1e300;
  out.worst_rescale_slack = -1e300;
  const double idt = 1e-9;  // algebraic-identity tolerance (fp rounding only)
  const double h = space.resolution();
  const int n = space.size();

  for (int pair = 0; pair < pairs; ++pair) {
    const std::vector<double> f = random_field(space, rng);
    const std::vector<double> g = random_field(space, rng);
    const std::vector<double> lf = local_lip(space, f);
    const std::vector<double> lg = local_lip(space, g);

    // product rule: lip(fg) <= |f| lip(g) + |g| lip(f) + lip(f) lip(g) h
    {
      std::vector<double> fg(n);
      for (int i = 0; i < n; ++i) fg[i] = f[i] * g[i];
      const std::vector<double> lfg = local_lip(space, fg);
      for (int i = 0; i < n; ++i) {
        const double rhs =
            std::abs(f[i]) * lg[i] + std::abs(g[i]) * lf[i] + lf[i] * lg[i] * h;
        out.worst_product_slack = std::max(out.worst_product_slack, lfg[i] - rhs);
        if (lfg[i] > rhs * (1.0 + idt) + idt) ++out.failures;
      }
    }
    // sublinearity, no slack term
    {
      const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
      std::vector<double> mix(n);
      for (int i = 0; i < n; ++i) mix[i] = a * f[i] + b * g[i];
      const std::vector<double> lm = local_lip(space, mix);
      for (int i = 0; i < n; ++i)
        if (lm[i] > (std::abs(a) * lf[i] + std::abs(b) * lg[i]) * (1.0 + idt) + idt)
          ++out.failures;
    }
    // averaged sublinearity over a convex combination of three fields
    {
      const std::vector<double> e = random_field(space, rng);
      const std::vector<double> le = local_lip(space, e);
      double w1 = rng.uniform(0.1, 1.0), w2 = rng.uniform(0.1, 1.0),
             w3 = rng.uniform(0.1, 1.0);
      const double ws = w1 + w2 + w3;
      w1 /= ws;
      w2 /= ws;
      w3 /= ws;
      std::vector<double> avg(n);
      for (int i = 0; i < n; ++i) avg[i] = w1 * f[i] + w2 * g[i] + w3 * e[i];
      const std::vector<double> la = local_lip(space, avg);
      for (int i = 0; i < n; ++i)
        if (la[i] > (w1 * lf[i] + w2 * lg[i] + w3 * le[i]) * (1.0 + idt) + idt)
          ++out.failures;
    }
    // truncation never increases lip
    {
      const double bound = rng.uniform(0.2, 1.0) * std::max(linf_norm(f), 1e-12);
      const std::vector<double> lt = local_lip(space, truncate(f, bound));
      for (int i = 0; i < n; ++i)
        if (lt[i] > lf[i] * (1.0 + idt) + idt) ++out.failures;
    }
    // quantitative lower semicontinuity: f_eps = f + eps g converges to f in
    // L2 and lip(f) <= lip(f_eps) + eps lip(g)
    {
      const double eps = 0x1p-20;
      std::vector<double> fe(n);
      for (int i = 0; i < n; ++i) fe[i] = f[i] + eps * g[i];
      const std::vector<double> lfe = local_lip(space, fe);
      for (int i = 0; i < n; ++i)
        if (lf[i] > lfe[i] + eps * lg[i] + idt) ++out.failures;
    }
    // rescale comparison: d' = d/L, m' = C m gives lip' = L lip and mass' = C mass
    {
      const double L = rng.uniform(0.5, 3.0), C = rng.uniform(0.5, 2.0);
      const FiniteSpace scaled = rescale_space(space, L, C);
      const std::vector<double> ls = local_lip(scaled, f);
      for (int i = 0; i < n; ++i) {
        out.worst_rescale_slack = std::max(out.worst_rescale_slack, ls[i] - L * lf[i]);
        if (ls[i] > L * lf[i] * (1.0 + idt) + idt) ++out.failures;
      }
      if (std::abs(scaled.total_mass() - C * space.total_mass()) >
          idt * space.total_mass())
        ++out.failures;
    }
  }
  return out;
}

std::vector<Curve> random_walk_curves(const FiniteSpace& space, Rng& rng, int count,
                                      int max_steps) {
  std::vector<Curve> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    std::vector<int> pts{static_cast<int>(rng.index(space.size()))};
    const int steps = 1 + static_cast<int>(rng.index(max_steps));
    for (int s = 0; s < steps; ++s) {
      const int at = pts.back();
      const int deg = space.degree(at);
      if (deg == 0) break;
      pts.push_back(space.neighbors_begin(at)[rng.index(deg)].to);
    }
    out.push_back(Curve::through(std::move(pts)));
  }
  return out;
}

}  // namespace mms::testsupport
