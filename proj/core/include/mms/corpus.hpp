#pragma once

#include <string>
#include <vector>

#include "mms/products.hpp"
#include "mms/rng.hpp"
#include "mms/tensorize.hpp"

namespace mms {

// Seeded field corpora shared by the property suites, scenarios and
// benchmarks. Product fields use the raw arclength coordinate of each factor
// (i*h on interval(L,n), i*L/n on circle(L,n)), so on the unit generators the
// formulas below read literally.

// Arclength position of each point, walking index order from point 0 along
// consecutive edges. Requires a path or cycle indexed along itself (true for
// the generators and any file in the same order).
std::vector<double> axis_positions(const FiniteSpace& s);

// Named fields: "sum" x+t, "product" x*t, "sincos" sin(2 pi x)cos(2 pi t),
// "crease" |x-t|. Unknown name -> Error(config).
std::vector<double> named_field(const ProductSpace& p, const std::string& name);
bool is_named_field(const std::string& name);
const std::vector<std::string>& named_field_names();

// Random trig tensor sum: N in {1,2,3} terms c sin(2 pi a x + p) sin(2 pi b t
// + q), frequencies a, b in {1..max_freq}, amplitudes c in [0.3, 1.5].
TensorSumField trig_tensor_sum(const FiniteSpace& x, const FiniteSpace& y, Rng& rng,
                               int max_freq = 2);

// Triangular multiscale cascade sum_{j=0..levels} s_j 2^-j tri(2^j u + p_j)
// with tri the unit triangle wave (range [0,1], slope +-2) and random signs
// and phases. Rough at every dyadic scale: smoothing errors decay at the
// generic first-order rate instead of the superconvergent rate of C^2 fields.
std::vector<double> cascade_factor(const FiniteSpace& s, int levels, Rng& rng);

// Tensor sum of cascade factors, N in {1,2,3}, term amplitudes in [0.5, 1.5].
TensorSumField cascade_tensor_sum(const FiniteSpace& x, const FiniteSpace& y, Rng& rng,
                                  int levels = 6);

// Single-space fields for the calculus identity suites.
// Trig mix: 1..3 terms of +-c sin(2 pi a u + p), c in [0.3, 1.5], a <= max_freq.
std::vector<double> random_trig_field(const FiniteSpace& s, Rng& rng, int max_freq = 3);
// Piecewise-linear cone mix: 1..max_terms terms of c * d(., q) with random
// anchors q and c in [-1, 1]; Lipschitz with kinks, defined on any space.
std::vector<double> random_pl_field(const FiniteSpace& s, Rng& rng, int max_terms = 4);
// Even split between the two families above.
std::vector<double> random_field(const FiniteSpace& s, Rng& rng);

}  // namespace mms
