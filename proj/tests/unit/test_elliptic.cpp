#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nlfp/elliptic.hpp"
#include "nlfp/error.hpp"
#include "oracles.hpp"

using namespace nlfp;

namespace {

SymMatrix sym2(double a, double b, double c) {
  SymMatrix m;
  m.n = 2;
  m(0, 0) = a;
  m(0, 1) = m(1, 0) = b;
  m(1, 1) = c;
  return m;
}

SymMatrix random_sym(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  SymMatrix m;
  m.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = d(rng);
  }
  return m;
}

std::vector<double> interior(const Grid& g, double (*fn)(const Point&)) {
  std::vector<double> v;
  for (std::size_t node : g.interior_nodes()) v.push_back(fn(g.position(node)));
  return v;
}

double quadratic(const Point& p) { return p[0] * p[0] + 3.0 * p[0] * p[1] + 2.0 * p[1] * p[1] - p[0]; }

}  // namespace

TEST_SUITE("elliptic") {
  TEST_CASE("eigenvalues") {
    const auto e = eigenvalues(sym2(2, 1, 2));
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(3.0));
    SymMatrix m;
    m.n = 3;
    m(0, 0) = 2;
    m(1, 1) = -1;
    m(2, 2) = 5;
    const auto f = eigenvalues(m);
    CHECK(f[0] == doctest::Approx(-1.0));
    CHECK(f[1] == doctest::Approx(2.0));
    CHECK(f[2] == doctest::Approx(5.0));
  }

  TEST_CASE("Pucci operators by hand") {
    const auto lo = EllipticOperator::pucci_minus(1, 2);
    const auto hi = EllipticOperator::pucci_plus(1, 2);
    const SymMatrix m = sym2(1, 0, -1);
    CHECK(lo(m) == doctest::Approx(-1.0));
    CHECK(hi(m) == doctest::Approx(1.0));
    CHECK(EllipticOperator::laplacian()(m) == doctest::Approx(0.0));
    CHECK(lo(SymMatrix{2, {}}) == 0.0);
    CHECK(hi(SymMatrix{3, {}}) == 0.0);
    CHECK_THROWS_AS(EllipticOperator::pucci_minus(2, 1), InvalidParameter);
    CHECK_THROWS_AS(EllipticOperator::pucci_plus(0, 1), InvalidParameter);
  }

  TEST_CASE("Pucci sandwich and policy") {
    std::mt19937_64 rng(3);
    const auto lo = EllipticOperator::pucci_minus(0.5, 3);
    const auto hi = EllipticOperator::pucci_plus(0.5, 3);
    const auto lap = EllipticOperator::laplacian();
    for (int k = 0; k < 200; ++k) {
      const int n = 1 + k % 3;
      const SymMatrix m = random_sym(rng, n);
      REQUIRE(lo(m) <= lap(m) + 1e-12);
      REQUIRE(lap(m) <= hi(m) + 1e-12);
      SymMatrix a;
      const double v = lo.evaluate_with_policy(m, a);
      double tr = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) tr += a(i, j) * m(j, i);
      }
      REQUIRE(tr == doctest::Approx(v));
      const SymMatrix other = random_sym(rng, n);
      double tr2 = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) tr2 += a(i, j) * other(j, i);
      }
      REQUIRE(lo(other) <= tr2 + 1e-12);
    }
  }

  TEST_CASE("Hessian of a quadratic is exact on a disk") {
    const Grid g = build_ball({0.05, 0, 0}, 0.9, 0.06, 2);
    const Discretization disc(g, BoundaryData(FunctionBoundary{quadratic}));
    const auto u = interior(g, quadratic);
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
      const SymMatrix h = disc.hessian(i, u);
      REQUIRE(h(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
      REQUIRE(h(1, 1) == doctest::Approx(4.0).epsilon(1e-8));
      REQUIRE(h(0, 1) == doctest::Approx(3.0).epsilon(1e-8));
      const Point x = g.position(g.interior_nodes()[i]);
      REQUIRE(disc.derivative(i, 0, u) == doctest::Approx(2 * x[0] + 3 * x[1] - 1).epsilon(1e-8));
    }
  }

  TEST_CASE("operators are exact on quadratics at full-stencil nodes") {
    std::mt19937_64 rng(17);
    const Grid grids[] = {build_ball({}, 1.0, 0.125, 2), build_ball({}, 1.0, 0.25, 3)};
    for (const Grid& g : grids) {
      const int n = g.dimension();
      for (int trial = 0; trial < 5; ++trial) {
        const SymMatrix m = random_sym(rng, n);
        auto q = [m, n](const Point& x) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) s += 0.5 * x[i] * m(i, j) * x[j];
          }
          return s;
        };
        const Discretization disc(g, BoundaryData(FunctionBoundary{q}));
        std::vector<double> u;
        for (std::size_t node : g.interior_nodes()) u.push_back(q(g.position(node)));
        for (const auto& op : {EllipticOperator::laplacian(), EllipticOperator::pucci_minus(0.5, 2),
                               EllipticOperator::pucci_plus(0.5, 2)}) {
          const auto Fu = apply_operator(op, disc, u);
          const double want = op(m);
          for (std::size_t i = 0; i < u.size(); ++i) {
            if (disc.full_stencil(i)) REQUIRE(Fu[i] == doctest::Approx(want).epsilon(1e-9).scale(1.0));
          }
        }
      }
    }
  }

  TEST_CASE("Laplacian of the disk solution") {
    // Delta u = -pi |x|^2 for u = (pi/16)(1 - |x|^4): second order at full stencils
    double err[2];
    int k = 0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
      const Grid g = build_ball({}, 1.0, h, 2);
      const Discretization disc(g, BoundaryData{});
      const auto u = interior(g, [](const Point& p) { return oracle::disk_solution(p[0], p[1]); });
      const auto lap = apply_operator(EllipticOperator::laplacian(), disc, u);
      const auto lo = apply_operator(EllipticOperator::pucci_minus(1, 2), disc, u);
      double e = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (!disc.full_stencil(i)) continue;
        const Point x = g.position(g.interior_nodes()[i]);
        const double want = -std::numbers::pi * (x[0] * x[0] + x[1] * x[1]);
        e = std::max(e, std::abs(lap[i] - want));
        REQUIRE(lo[i] <= lap[i] + 1e-12);
      }
      err[k++] = e;
    }
    CHECK(err[0] < 1e-2);
    CHECK(err[1] <= err[0] / 3.0);
  }

  TEST_CASE("Laplacian solve reproduces a quadratic") {
    auto exact = [](const Point& p) { return 1.0 - p[0] * p[0] - p[1] * p[1]; };
    const Grid g = build_ball({}, 1.0, 0.05, 2);
    const Discretization disc(g, BoundaryData(FunctionBoundary{exact}));
    DirichletSolver solver(disc, EllipticOperator::laplacian());
    const auto r = solver.solve(std::vector<double>(g.interior_count(), -4.0));
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      REQUIRE(r.u[i] == doctest::Approx(exact(g.position(g.interior_nodes()[i]))).epsilon(1e-8));
    }
  }

  TEST_CASE("Pucci Newton solve reproduces a quadratic") {
    // D^2u = -I on u = (1 - |x|^2)/2, so M-(1,2) u = 2 * (-2) = -4
    auto exact = [](const Point& p) { return 0.5 * (1.0 - p[0] * p[0] - p[1] * p[1]); };
    const Grid g = build_ball({}, 1.0, 0.05, 2);
    const Discretization disc(g, BoundaryData(FunctionBoundary{exact}));
    DirichletSolver solver(disc, EllipticOperator::pucci_minus(1, 2));
    CHECK(solver.method() == InnerMethod::Newton);
    const auto r = solver.solve(std::vector<double>(g.interior_count(), -4.0));
    for (std::size_t i = 0; i < r.u.size(); ++i) {
      REQUIRE(r.u[i] == doctest::Approx(exact(g.position(g.interior_nodes()[i]))).epsilon(1e-8));
    }
  }

  TEST_CASE("pseudo-time and Newton agree") {
    const Grid g = build_ball({}, 1.0, 0.125, 2);
    const Discretization disc(g, BoundaryData(RadialPolynomialBoundary{{}, {0.1, 0.0, 0.2}}));
    std::vector<double> f(g.interior_count());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = -1.0 - 0.5 * std::sin(3.0 * g.position(g.interior_nodes()[i])[0]);
    const auto op = EllipticOperator::pucci_plus(0.5, 1.5);
    DirichletSolver newton(disc, op);
    InnerSolveConfig pt;
    pt.method = InnerMethod::PseudoTime;
    pt.tolerance = 1e-9;
    DirichletSolver explicit_solver(disc, op, pt);
    const auto a = newton.solve(f);
    const auto b = explicit_solver.solve(f);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(a.u[i] == doctest::Approx(b.u[i]).epsilon(1e-6));
  }

  TEST_CASE("method resolution") {
    CHECK(resolve_method(EllipticOperator::laplacian(), InnerMethod::Auto) == InnerMethod::Linear);
    CHECK(resolve_method(EllipticOperator::pucci_minus(1, 2), InnerMethod::Auto) == InnerMethod::Newton);
    CHECK_THROWS_AS(resolve_method(EllipticOperator::pucci_minus(1, 2), InnerMethod::Linear),
                    InvalidParameter);
  }

  TEST_CASE("linearized solve needs a prior Pucci solve") {
    const Grid g = build_ball({}, 1.0, 0.125, 2);
    const Discretization disc(g, BoundaryData{});
    DirichletSolver p(disc, EllipticOperator::pucci_minus(1, 2));
    CHECK_THROWS_AS(p.solve_linearized(std::vector<double>(g.interior_count(), 1.0)), PreconditionError);
    DirichletSolver l(disc, EllipticOperator::laplacian());
    const std::vector<double> f(g.interior_count(), -1.0);
    const auto u = l.solve(f).u;
    const auto d = l.solve_linearized(f);
    for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(d[i] == doctest::Approx(u[i]).epsilon(1e-10));
  }

  TEST_CASE("maximum principle on a sign-definite right-hand side") {
    const Grid g = build_box({{0, 1}, {0, 2}}, 0.05);
    const Discretization disc(g, BoundaryData(AxisTableBoundary{0, PiecewiseLinear({0, 1}, {0.2, -0.4})}));
    const auto op = EllipticOperator::pucci_minus(0.5, 1.0);
    const std::vector<double> f(g.interior_count(), 2.0);
    DirichletSolver s(disc, op);
    const auto u = s.solve(f).u;
    const auto r = maximum_principle_check(op, u, f, disc, 1e-6);
    CHECK(r.f_sign == 1);
    CHECK(r.upper_ok);
    CHECK(r.abp_ok);
    CHECK(r.sup_u <= r.sup_boundary + 1e-6);
    CHECK(r.passed());
  }
}
