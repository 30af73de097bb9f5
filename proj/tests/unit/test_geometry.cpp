#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlfp/error.hpp"
#include "nlfp/geometry.hpp"
#include "oracles.hpp"

using namespace nlfp;

namespace {
std::size_t count_class(const Grid& g, NodeClass c) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) k += g.node_class(i) == c ? 1 : 0;
  return k;
}
}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("unit square with h = 1/2 has one interior node") {
    const Grid g = build_box({{0, 1}, {0, 1}}, 0.5);
    REQUIRE(g.interior_count() == 1);
    CHECK(count_class(g, NodeClass::Boundary) == 8);
    const Point p = g.position(g.interior_nodes()[0]);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
  }

  TEST_CASE("interval nodes") {
    const Grid g = build_box({{-1, 1}}, 0.5);
    REQUIRE(g.interior_count() == 3);
    CHECK(g.position(g.interior_nodes()[0])[0] == -0.5);
    CHECK(g.position(g.interior_nodes()[1])[0] == 0.0);
    CHECK(g.position(g.interior_nodes()[2])[0] == 0.5);
    CHECK(domain_measure(g) == 1.5);
  }

  TEST_CASE("box measure and offsets") {
    const Grid g = build_box({{0, 1}, {0, 1}}, 0.25);
    CHECK(g.interior_count() == 9);
    CHECK(domain_measure(g) == 0.5625);
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
      for (int a = 0; a < 2; ++a) {
        for (int s = 0; s < 2; ++s) CHECK(g.arm(i, a, s).theta == 1.0);
      }
    }
  }

  TEST_CASE("box rejects bad spacing") {
    CHECK_THROWS_AS(build_box({{0, 1}, {0, 0.4}}, 0.5), InvalidGrid);
    CHECK_THROWS_AS(build_box({{0, 1}}, 0.3), InvalidGrid);
    CHECK_THROWS_AS(build_box({{0, 1}}, 1.0), InvalidGrid);
    CHECK_THROWS_AS(build_box({{0, 1}}, -0.1), InvalidGrid);
  }

  TEST_CASE("ball needs radius above 2h") {
    // r = 1, h = 1/2 sits on the r > 2h limit and is rejected.
    CHECK_THROWS_AS(build_ball({}, 1.0, 0.5, 2), InvalidGrid);
    const Grid g = build_ball({}, 1.01, 0.5, 2);
    CHECK(g.interior_count() == oracle::ball_nodes(1.01, 0.5, 2));
    // center, four axis and four diagonal neighbours, and the four nodes at
    // distance 1 < 1.01
    CHECK(g.interior_count() == 13);
  }

  TEST_CASE("ball arm ending on a lattice node has theta 1") {
    const Grid g = build_ball({}, 1.0, 0.25, 2);
    bool found = false;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
      const Point p = g.position(g.interior_nodes()[i]);
      if (p[0] == 0.75 && p[1] == 0.0) {
        const Arm& arm = g.arm(i, 0, 1);
        CHECK(arm.neighbor < 0);
        CHECK(arm.theta == doctest::Approx(1.0).epsilon(1e-12));
        found = true;
      }
    }
    CHECK(found);
  }

  TEST_CASE("ball interior counts match lattice enumeration") {
    for (int n = 1; n <= 3; ++n) {
      for (double h : {0.25, 0.125, 0.0625}) {
        if (n == 3 && h < 0.1) continue;
        const Grid g = build_ball({}, 1.0, h, n);
        CHECK(g.interior_count() == oracle::ball_nodes(1.0, h, n));
      }
    }
    const Grid a = build_annulus({}, 0.3, 1.0, 0.0625, 2);
    CHECK(a.interior_count() == oracle::annulus_nodes(0.3, 1.0, 0.0625, 2));
  }

  TEST_CASE("disk measure converges to pi") {
    double prev = INFINITY;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const Grid g = build_ball({}, 1.0, h, 2);
      const double err = std::abs(domain_measure(g) - std::numbers::pi);
      // perimeter * h bounds the cells cut by the circle
      CHECK(err <= 2.0 * std::numbers::pi * h);
      CHECK(err < prev * 1.01);
      prev = err;
    }
    const Grid g32 = build_ball({}, 1.0, 1.0 / 32, 2);
    CHECK(std::abs(domain_measure(g32) - std::numbers::pi) / std::numbers::pi < 0.05);
  }

  TEST_CASE("interior nodes and arms are consistent with the domain") {
    const Grid balls[] = {build_ball({0.1, -0.2, 0}, 0.9, 0.07, 2),
                          build_ball({}, 1.0, 0.15, 3),
                          build_annulus({}, 0.35, 1.0, 0.05, 2)};
    for (const Grid& g : balls) {
      const int n = g.dimension();
      for (std::size_t i = 0; i < g.interior_count(); ++i) {
        const Point x = g.position(g.interior_nodes()[i]);
        REQUIRE(g.contains(x));
        for (int a = 0; a < n; ++a) {
          for (int s = 0; s < 2; ++s) {
            const Arm& arm = g.arm(i, a, s);
            if (arm.neighbor >= 0) {
              CHECK(arm.theta == 1.0);
              continue;
            }
            CHECK(arm.theta > 0.0);
            CHECK(arm.theta <= 1.0);
            // the endpoint lies on the boundary
            CHECK(std::abs(g.boundary_distance(arm.boundary_point)) < 1e-9);
          }
        }
      }
    }
  }

  TEST_CASE("rebuilding gives identical classification") {
    const Grid a = build_ball({0.1, 0, 0}, 0.8, 0.03, 2);
    const Grid b = build_ball({0.1, 0, 0}, 0.8, 0.03, 2);
    REQUIRE(a.node_count() == b.node_count());
    bool same = true;
    for (std::size_t i = 0; i < a.node_count(); ++i) same = same && a.node_class(i) == b.node_class(i);
    CHECK(same);
    CHECK(a.id() != b.id());
  }

  TEST_CASE("boundary data") {
    const BoundaryData psi(RadialPolynomialBoundary{{}, {1.0, 0.0, -2.0}});
    CHECK(psi({0.5, 0, 0}) == doctest::Approx(0.5));
    const BoundaryData t(AxisTableBoundary{1, PiecewiseLinear({0, 1}, {2, 4})});
    CHECK(t({9, 0.25, 0}) == doctest::Approx(2.5));
    CHECK(BoundaryData{}({1, 2, 3}) == 0.0);
    CHECK_THROWS_AS(PiecewiseLinear({0, 0}, {1, 2}), InvalidParameter);
  }
}
