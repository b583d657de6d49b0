#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "mms/calculus.hpp"
#include "mms/corpus.hpp"
#include "mms/cubes.hpp"
#include "mms/products.hpp"
#include "mms/rng.hpp"
#include "mms/space.hpp"
#include "mms/tensorize.hpp"

using namespace mms;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::io;  // sentinel: "did not throw"
}

TensorSumField coordinate_sum(const FiniteSpace& x, const FiniteSpace& y) {
  std::vector<double> ones_x(x.size(), 1.0), ones_y(y.size(), 1.0);
  return TensorSumField::make(x, y, {axis_positions(x), ones_x},
                              {ones_y, axis_positions(y)});
}

}  // namespace

TEST_SUITE("tensorize") {
  TEST_CASE("tensor sums evaluate term by term and validate shapes") {
    FiniteSpace X = FiniteSpace::interval(1.0, 3);
    FiniteSpace Y = FiniteSpace::interval(1.0, 4);
    ProductSpace p = ProductSpace::cartesian(X, Y);
    TensorSumField tf = TensorSumField::make(
        X, Y, {{1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}}, {{1.0, 0.0, -1.0, 2.0}, {0.5, 0.5, 0.5, 0.5}});
    std::vector<double> f = tf.evaluate(p);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 4; ++y) {
        const double want = (x + 1.0) * tf.hy[0][y] + 0.5;
        CHECK(f[p.node(x, y)] == doctest::Approx(want).epsilon(1e-15));
      }
    CHECK(kind_of([&] { TensorSumField::make(X, Y, {}, {}); }) == ErrorKind::config);
    CHECK(kind_of([&] { TensorSumField::make(X, Y, {{1.0, 2.0}}, {{1.0}}); }) ==
          ErrorKind::config);
  }

  TEST_CASE("slice lips of x+t are 1 and the energies equal the mass") {
    FiniteSpace X = FiniteSpace::interval(1.0, 30);
    ProductSpace p = ProductSpace::cartesian(X, X);
    std::vector<double> f = coordinate_sum(X, X).evaluate(p);
    for (double v : slice_lip_x(p, f)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : slice_lip_y(p, f)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x_energy(p, f) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(y_energy(p, f) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("cube averages match directly computed cube means") {
    FiniteSpace X = FiniteSpace::interval(1.0, 20);
    FiniteSpace Y = FiniteSpace::interval(1.0, 200);
    ProductSpace p = ProductSpace::cartesian(X, Y);
    CubePartition part = build_cubes(Y, 4);
    std::vector<double> pos = axis_positions(Y);
    std::vector<double> f = p.make_field([&](int, int y) { return pos[y]; });
    CubeAverages avg = cube_average(p, f, part);

    REQUIRE(avg.fk.size() == part.centers.size());
    double total = 0.0;
    for (std::size_t i = 0; i < part.members.size(); ++i) {
      double num = 0.0, den = 0.0;
      for (int t : part.members[i]) {
        num += pos[t] * Y.measure(t);
        den += Y.measure(t);
      }
      CHECK(avg.cube_mass[i] == doctest::Approx(den).epsilon(1e-12));
      for (int x = 0; x < X.size(); ++x)
        CHECK(avg.fk[i][x] == doctest::Approx(num / den).epsilon(1e-12));
      total += avg.cube_mass[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(avg.worst_jensen_excess <= 1e-12);
  }

  TEST_CASE("averages of t-independent fields reproduce the x-profile") {
    FiniteSpace X = FiniteSpace::interval(1.0, 25);
    FiniteSpace Y = FiniteSpace::interval(1.0, 60);
    ProductSpace p = ProductSpace::cartesian(X, Y);
    std::vector<double> g = axis_positions(X);
    std::vector<double> f = p.make_field([&](int x, int) { return g[x] * g[x] - 0.3; });
    CubePartition part = build_cubes(Y, 4);
    CubeAverages avg = cube_average(p, f, part);
    for (std::size_t i = 0; i < avg.fk.size(); ++i)
      for (int x = 0; x < X.size(); ++x)
        CHECK(avg.fk[i][x] == doctest::Approx(g[x] * g[x] - 0.3).epsilon(1e-12));

    // single cube: the full Y-mean
    CubePartition one = build_cubes(Y, 1);
    CubeAverages global = cube_average(p, f, one);
    REQUIRE(global.fk.size() == 1);
    CHECK(global.cube_mass[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("smoothing is exact on t-independent and constant fields") {
    FiniteSpace X = FiniteSpace::interval(1.0, 40);
    ProductSpace p = ProductSpace::cartesian(X, X);
    std::vector<double> g = axis_positions(X);
    std::vector<double> f = p.make_field([&](int x, int) { return std::sin(3.0 * g[x]); });
    SmoothResult r = smooth(p, f, 5);
    double worst = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q)
      worst = std::max(worst, std::abs(r.field[q] - f[q]));
    CHECK(worst <= 1e-12);
    CHECK(r.norm_ratio == doctest::Approx(1.0).epsilon(1e-10));

    std::vector<double> c(p.size(), 0.7);
    SmoothResult rc = smooth(p, c, 5);
    for (double v : rc.field) CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
  }

  TEST_CASE("smoothing the coordinate stays within the cube window") {
    FiniteSpace X = FiniteSpace::interval(1.0, 200);
    ProductSpace p = ProductSpace::cartesian(X, X);
    std::vector<double> pos = axis_positions(X);
    std::vector<double> f = p.make_field([&](int, int y) { return pos[y]; });
    const int k = 10;
    CubePartition part = build_cubes(X, k);
    PartitionOfUnity pou = partition_of_unity(X, part);
    SmoothResult r = smooth(p, f, part, pou);
    double worst = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q)
      worst = std::max(worst, std::abs(r.field[q] - f[q]));
    CHECK(worst <= 9.0 / (4.0 * k) + 1e-12);  // averages live inside B(t_i, 1/k)
    CHECK(r.max_terms >= 1);
    CHECK(r.max_terms <= 3);  // supports of radius 5/(4k) with centers > 1/k apart

    SmoothResult again = smooth(p, f, k);
    double diff = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q)
      diff = std::max(diff, std::abs(again.field[q] - r.field[q]));
    CHECK(diff == 0.0);  // the convenience overload builds the same partition
  }

  TEST_CASE("telescoping identity holds to roundoff") {
    FiniteSpace X = FiniteSpace::interval(1.0, 30);
    FiniteSpace Y = FiniteSpace::interval(1.0, 200);
    ProductSpace p = ProductSpace::cartesian(X, Y);
    Rng rng(23);
    std::vector<double> f = trig_tensor_sum(X, Y, rng).evaluate(p);
    CubePartition part = build_cubes(Y, 8);
    PartitionOfUnity pou = partition_of_unity(Y, part);
    CubeAverages avg = cube_average(p, f, part);
    std::vector<std::pair<int, int>> pairs;
    for (int trial = 0; trial < 60; ++trial) {
      int x = rng.index(X.size());
      pairs.emplace_back(p.node(x, rng.index(Y.size())), p.node(x, rng.index(Y.size())));
    }
    CHECK(telescoping_residual(p, avg, pou, pairs, 0) <= 1e-12);
    CHECK(telescoping_residual(p, avg, pou, pairs, 3) <= 1e-12);
  }

  TEST_CASE("neighbor differences are controlled by the measured constant") {
    FiniteSpace X = FiniteSpace::interval(1.0, 30);
    FiniteSpace Y = FiniteSpace::interval(1.0, 200);
    ProductSpace p = ProductSpace::cartesian(X, Y);
    Rng rng(31);
    std::vector<double> f = trig_tensor_sum(X, Y, rng).evaluate(p);
    NeighborDiffReport rep = neighbor_difference_check(p, f, build_cubes(Y, 8));
    CHECK(rep.ok);
    CHECK(rep.c_measured > 0.0);
    CHECK(rep.worst_ratio <= rep.c_measured + 1e-9);
  }

  TEST_CASE("convergence experiment: decreasing errors, fixed references") {
    FiniteSpace X = FiniteSpace::interval(1.0, 120);
    ProductSpace p = ProductSpace::cartesian(X, X);
    std::vector<double> f = named_field(p, "sincos");
    ConvergenceTable table = convergence_experiment(p, f, {4, 8, 16});
    REQUIRE(table.rows.size() == 3);
    const double ex = x_energy(p, f), ey = y_energy(p, f);
    for (const auto& r : table.rows) {
      CHECK(r.ref_x_energy == doctest::Approx(ex).epsilon(1e-12));
      CHECK(r.ref_y_energy == doctest::Approx(ey).epsilon(1e-12));
      CHECK(r.norm_ratio > 0.0);
      CHECK(r.norm_ratio <= 1.05);
      CHECK(r.max_terms >= 1);
      CHECK(r.max_terms <= 3);
      CHECK(r.l2_error > 0.0);
    }
    CHECK(table.rows[1].l2_error < table.rows[0].l2_error);
    CHECK(table.rows[2].l2_error < table.rows[1].l2_error);
    CHECK(table.slope <= -0.8);

    CHECK(kind_of([&] { convergence_experiment(p, f, {}); }) == ErrorKind::config);
    CHECK(kind_of([&] { convergence_experiment(p, f, {8, 4}); }) == ErrorKind::config);
    CHECK(kind_of([&] { convergence_experiment(p, f, {4, 4}); }) == ErrorKind::config);

    std::ostringstream out;
    save_csv(out, table);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "k,l2_error,x_energy,y_energy,ref_x_energy,ref_y_energy");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("factor-4 splitting: x+t sits at ratio 1, smooth fields stay low") {
    FiniteSpace X = FiniteSpace::interval(1.0, 100);
    ProductSpace p = ProductSpace::cartesian(X, X);
    TensorSumField tf = coordinate_sum(X, X);
    LemmaReport rep = lemma_lip_check(p, tf);
    CHECK(rep.max_r == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.over_4 == 0);
    CHECK(rep.interior_count == 92 * 92);

    LemmaReport direct = lemma_lip_check(p, tf.evaluate(p));
    CHECK(direct.max_r == rep.max_r);

    LemmaReport sc = lemma_lip_check(p, named_field(p, "sincos"));
    CHECK(sc.max_r <= 1.05);
    CHECK(sc.over_4 == 0);
  }

  TEST_CASE("sandwich ratios: linear and crease fields attain rho = 1") {
    FiniteSpace X = FiniteSpace::interval(1.0, 100);
    ProductSpace p = ProductSpace::cartesian(X, X);
    for (const char* name : {"sum", "crease"}) {
      SandwichReport rep = sandwich_report(p, named_field(p, name));
      INFO("field ", name);
      CHECK(rep.min_rho == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rep.max_rho == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rep.interior_count == 92 * 92);
      CHECK(std::accumulate(rep.histogram.begin(), rep.histogram.end(), 0) ==
            rep.interior_count);
      CHECK(rep.histogram[9] + rep.histogram[10] == rep.interior_count);
      CHECK(rep.floor > 0.0);
    }
  }

  TEST_CASE("merged sandwich reports fold the per-field reports") {
    FiniteSpace X = FiniteSpace::interval(1.0, 80);
    ProductSpace p = ProductSpace::cartesian(X, X);
    std::vector<double> a = named_field(p, "sincos"), b = named_field(p, "product");
    SandwichReport ra = sandwich_report(p, a), rb = sandwich_report(p, b);
    SandwichReport merged = sandwich_report(p, std::vector<std::vector<double>>{a, b});
    CHECK(merged.min_rho == std::min(ra.min_rho, rb.min_rho));
    CHECK(merged.max_rho == std::max(ra.max_rho, rb.max_rho));
    CHECK(merged.interior_count == ra.interior_count + rb.interior_count);
    CHECK(merged.floor == 0.0);
    for (int i = 0; i < 30; ++i)
      CHECK(merged.histogram[i] == ra.histogram[i] + rb.histogram[i]);
    CHECK(kind_of([&] {
            sandwich_report(p, std::vector<std::vector<double>>{});
          }) == ErrorKind::config);
  }

  TEST_CASE("cutoff families: psi covers the requested ball, sigma is a collar") {
    FiniteSpace X = FiniteSpace::interval(10.0, 101);
    FiniteSpace Y = FiniteSpace::interval(10.0, 101);
    WarpSpec w = WarpSpec::make(Y, std::vector<double>(101, 1.0), std::vector<double>(101, 1.0));
    ProductSpace p = ProductSpace::warped(X, Y, w);
    const int x0 = 50, t0 = 50;
    CutoffFamily fam = build_cutoffs(p, x0, t0, 2, 4, 2);
    for (int t = 0; t < Y.size(); ++t) {
      CHECK(fam.psi[t] >= 0.0);
      CHECK(fam.psi[t] <= 1.0 + 1e-12);
      if (Y.distance(t, t0) <= 2.0) CHECK(fam.psi[t] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(fam.eta[t] == 1.0);  // no zeros anywhere
    }
    for (int x = 0; x < X.size(); ++x) {
      const double want = std::clamp(4.0 - X.distance(x, x0), 0.0, 1.0);
      CHECK(fam.sigma[x] == doctest::Approx(want).epsilon(1e-12));
    }
    for (int x = 0; x < X.size(); ++x)
      for (int t = 0; t < Y.size(); ++t)
        CHECK(fam.multiplier[p.node(x, t)] ==
              doctest::Approx(fam.psi[t] * fam.eta[t] * fam.sigma[x]).epsilon(1e-12));

    CHECK(kind_of([&] { build_cutoffs(p, x0, t0, 1, 4, 2); }) == ErrorKind::config);
    CHECK(kind_of([&] { build_cutoffs(p, -1, t0, 2, 4, 2); }) == ErrorKind::config);
    ProductSpace cart = ProductSpace::cartesian(X, Y);
    CHECK(kind_of([&] { build_cutoffs(cart, x0, t0, 2, 4, 2); }) == ErrorKind::config);
  }

  TEST_CASE("log cutoff against the distance to the zero set") {
    FiniteSpace Y = FiniteSpace::interval(1.0, 50);
    FiniteSpace X = FiniteSpace::circle(1.0, 24);
    std::vector<double> t = axis_positions(Y);
    ProductSpace cone = ProductSpace::warped(X, Y, WarpSpec::make(Y, t, t));
    const int n = 8;
    CutoffFamily fam = build_cutoffs(cone, 0, 49, n, 3, 4);
    CHECK(fam.eta[0] == 0.0);
    for (int y = 1; y < 50; ++y) {
      const double d = Y.distance(y, 0);
      const double want = std::clamp(1.0 - std::abs(std::log(d)) / std::log(double(n)), 0.0, 1.0);
      CHECK(fam.eta[y] == doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("linear decay verifier: constants, zeros, discreteness") {
    FiniteSpace Y = FiniteSpace::interval(1.0, 50);
    std::vector<double> t = axis_positions(Y);
    WarpSpec w = WarpSpec::make(Y, t, t);
    DecayCheck chk = check_linear_decay(Y, w, 0.5);
    CHECK(chk.constant == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chk.zeros == std::vector<int>{0});

    std::vector<double> ones(50, 1.0);
    DecayCheck none = check_linear_decay(Y, WarpSpec::make(Y, ones, ones), 0.5);
    CHECK(none.zeros.empty());
    CHECK(none.constant == 0.0);

    std::vector<double> paired = t;
    paired[1] = 0.0;  // two zeros one edge apart
    CHECK(kind_of([&] {
            check_linear_decay(Y, WarpSpec::make(Y, paired, paired), 0.5);
          }) == ErrorKind::hypothesis_violated);
  }

  TEST_CASE("cutoff convergence is exactly zero when the multiplier is 1 on supp f") {
    FiniteSpace X = FiniteSpace::interval(10.0, 101);
    FiniteSpace Y = FiniteSpace::interval(10.0, 101);
    WarpSpec w = WarpSpec::make(Y, std::vector<double>(101, 1.0), std::vector<double>(101, 1.0));
    ProductSpace p = ProductSpace::warped(X, Y, w);
    const int x0 = 50, t0 = 50;
    std::vector<double> posx = axis_positions(X), posy = axis_positions(Y);
    std::vector<double> f = p.make_field([&](int x, int y) {
      const double bump = std::max(0.0, 0.5 - std::abs(posy[y] - posy[t0]));
      return std::cos(posx[x]) * bump;
    });
    CutoffTable table = cutoff_convergence(p, f, x0, t0, {{{2, 12, 2}}, {{4, 12, 2}}});
    REQUIRE(table.rows.size() == 2);
    for (const auto& r : table.rows) {
      INFO("n ", r.n);
      CHECK(r.l2_error <= 1e-12);
      CHECK(r.bl_error <= 1e-12);
      CHECK(r.x_deficit <= 1e-12);
      CHECK(r.x_tail <= 1e-12);
      CHECK(r.t_deficit <= 1e-12);
      CHECK(r.t_psi_tail <= 1e-12);
      CHECK(r.t_eta_term <= 1e-12);
      CHECK(r.zeros_in_ball == 0);
      CHECK(r.eta_ok);
    }
    CHECK(table.eta_monotone);
    CHECK(table.eta_fit_residual == 0.0);

    CHECK(kind_of([&] { cutoff_convergence(p, f, x0, t0, {}); }) == ErrorKind::config);
  }

  TEST_CASE("a decay cap below the measured constant trips the hypothesis gate") {
    FiniteSpace X = FiniteSpace::circle(1.0, 24);
    FiniteSpace Y = FiniteSpace::interval(1.0, 50);
    std::vector<double> t = axis_positions(Y);
    ProductSpace cone = ProductSpace::warped(X, Y, WarpSpec::make(Y, t, t));
    std::vector<double> f(cone.size(), 0.0);
    CHECK(kind_of([&] {
            cutoff_convergence(cone, f, 0, 49, {{{4, 3, 4}}}, -1.0, 0.5);
          }) == ErrorKind::decay_hypothesis);
  }
}
