#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mms/analysis.hpp"
#include "mms/calculus.hpp"
#include "mms/space.hpp"

using namespace mms;

namespace {

// Closed-form ball counts on the generators (distances are grid multiples);
// an oracle for measure_doubling that never runs Dijkstra. Radii must stay
// away from exact grid multiples so fp accumulation cannot flip membership.
double interval_grid_doubling(int n, double length, const std::vector<double>& radii) {
  const double h = length / (n - 1);
  auto count = [&](int c, double r) {
    const int steps = static_cast<int>(std::floor(r / h));
    return std::min(n - 1, c + steps) - std::max(0, c - steps) + 1;
  };
  double best = 0.0;
  for (int c = 0; c < n; ++c)
    for (double r : radii)
      best = std::max(best, static_cast<double>(count(c, 2.0 * r)) / count(c, r));
  return best;
}

double circle_grid_doubling(int n, double length, const std::vector<double>& radii) {
  const double h = length / n;
  auto count = [&](double r) {
    const int steps = std::min(static_cast<int>(std::floor(r / h)), n / 2);
    return std::min(n, 2 * steps + 1);
  };
  double best = 0.0;
  for (double r : radii) best = std::max(best, static_cast<double>(count(2.0 * r)) / count(r));
  return best;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("two-point space: measure doubling jumps to 2 past half the edge") {
    FiniteSpace s = FiniteSpace::build({1.0, 1.0}, {{0, 1, 1.0}});
    auto rep = measure_doubling(s, {0.6});
    CHECK(rep.measure_constant == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rep.measure_witness.radius == doctest::Approx(0.6));
    // balls of radius 0.6 are singletons; one half-ball covers each
    auto met = metric_doubling(s, {0.6});
    CHECK(met.metric_constant == doctest::Approx(1.0));
    CHECK(verify_doubling_remark(s, {0.6}).ok);
  }

  TEST_CASE("interval doubling matches the closed-form grid oracle") {
    const std::vector<double> radii{0.0101, 0.0503, 0.1507, 0.3701};
    FiniteSpace s = FiniteSpace::interval(1.0, 501);
    auto rep = measure_doubling(s, radii);
    CHECK(rep.measure_constant ==
          doctest::Approx(interval_grid_doubling(501, 1.0, radii)).epsilon(1e-12));
  }

  TEST_CASE("circle doubling matches the closed-form grid oracle") {
    const std::vector<double> radii{0.0103, 0.0509, 0.1497};
    FiniteSpace s = FiniteSpace::circle(1.0, 200);
    auto rep = measure_doubling(s, radii);
    CHECK(rep.measure_constant ==
          doctest::Approx(circle_grid_doubling(200, 1.0, radii)).epsilon(1e-12));
  }

  TEST_CASE("default radii: geometric grid inside (h, diameter]") {
    FiniteSpace s = FiniteSpace::interval(1.0, 501);
    auto radii = default_radii(s);
    REQUIRE(radii.size() == 8);
    CHECK(radii.front() == doctest::Approx(4.0 * s.resolution()).epsilon(1e-12));
    CHECK(radii.back() == doctest::Approx(s.diameter() / 2.0).epsilon(1e-12));
    CHECK(std::is_sorted(radii.begin(), radii.end()));
    auto rep = doubling_report(s, radii);
    CHECK(rep.warnings.empty());
    CHECK(rep.measure_constant > 1.0);
    CHECK(rep.metric_constant >= 1.0);
  }

  TEST_CASE("metric doubling on generators stays under the remark bound") {
    for (const FiniteSpace& s :
         {FiniteSpace::interval(1.0, 501), FiniteSpace::circle(1.0, 200)}) {
      auto chk = verify_doubling_remark(s, default_radii(s));
      CHECK(chk.ok);
      CHECK(chk.slack >= 0.0);
      // a line segment is covered by 3 half-radius balls
      CHECK(chk.report.metric_constant <= 4.0);
    }
  }

  TEST_CASE("two-point Poincare constant is exactly 1/8") {
    // u = (a,b): lhs = ((a-b)/2)^2, rhs = 1^2 * 2(a-b)^2, ratio 1/8 for all u
    FiniteSpace s = FiniteSpace::build({1.0, 1.0}, {{0, 1, 1.0}});
    auto rep = poincare_constant(s, 0, 1.0, 1.0);
    CHECK(rep.c_p == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(rep.c_p_surrogate == doctest::Approx(0.125).epsilon(1e-10));
    auto chk = poincare_check(s, rep.extremal, local_lip(s, rep.extremal), 0, 1.0,
                              1.0, rep.c_p);
    CHECK(std::abs(chk.residual) <= 1e-12 * std::max(chk.lhs, 1e-30));
  }

  TEST_CASE("interval Poincare constant approaches 4/pi^2") {
    FiniteSpace s = FiniteSpace::interval(1.0, 201);
    auto rep = poincare_constant(s, 100, s.diameter() / 2.0, 1.0);
    // continuum Neumann constant for the unit interval
    CHECK(rep.c_p == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(0.02));
    CHECK(rep.iterations > 0);
    CHECK(static_cast<int>(rep.extremal.size()) == s.size());
    auto chk = poincare_check(s, rep.extremal, local_lip(s, rep.extremal), 100,
                              s.diameter() / 2.0, 1.0, rep.c_p);
    CHECK(std::abs(chk.residual) <= 1e-9 * std::max(chk.lhs, 1e-30));
  }

  TEST_CASE("Poincare iteration cap raises no-convergence") {
    FiniteSpace s = FiniteSpace::interval(1.0, 51);
    CHECK_THROWS_AS(poincare_constant(s, 25, 1.0, 1.0, 1), Error);
  }

  TEST_CASE("Poincare inequality holds for arbitrary fields at the reported c_p") {
    FiniteSpace s = FiniteSpace::interval(1.0, 101);
    auto rep = poincare_constant(s, 50, s.diameter() / 2.0, 1.0);
    // a hand-picked field cannot beat the maximized quotient
    std::vector<double> u(s.size());
    for (int i = 0; i < s.size(); ++i) u[i] = std::cos(3.0 * i / 100.0) + 0.1 * i / 100.0;
    auto chk = poincare_check(s, u, local_lip(s, u), 50, s.diameter() / 2.0, 1.0,
                              rep.c_p);
    CHECK(chk.ok);
    CHECK(chk.lhs <= rep.c_p * chk.rhs * (1.0 + 1e-9));
  }
}
