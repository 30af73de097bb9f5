#include "nlfp/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <set>

#include "nlfp/error.hpp"

namespace nlfp {

namespace {

double distance(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int d = 0; d < n; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

// Unit directions for barrier sampling: +-1 in 1D, 8 angles in 2D, the 26
// normalized nonzero vectors of {-1,0,1}^3 in 3D.
std::vector<Point> sample_directions(int n) {
  std::vector<Point> out;
  if (n == 1) {
    out.push_back({1.0, 0.0, 0.0});
    out.push_back({-1.0, 0.0, 0.0});
  } else if (n == 2) {
    for (int k = 0; k < 8; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 8.0;
      out.push_back({std::cos(a), std::sin(a), 0.0});
    }
  } else {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        for (int k = -1; k <= 1; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          const double len = std::sqrt(static_cast<double>(i * i + j * j + k * k));
          out.push_back({i / len, j / len, k / len});
        }
      }
    }
  }
  return out;
}

Point along(const Point& c, const Point& dir, double t) {
  return {c[0] + t * dir[0], c[1] + t * dir[1], c[2] + t * dir[2]};
}

}  // namespace

double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw InvalidParameter("unit_ball_volume: dimension must be 1, 2 or 3");
  }
}

BallSolution::BallSolution(const Point& center, double radius, int dimension, double scale)
    : center_(center), radius_(radius), n_(dimension), scale_(scale) {
  if (!(radius > 0.0)) throw InvalidParameter("ball solution: radius must be positive");
  k_ = scale * unit_ball_volume(dimension) / (2.0 * n_ * (n_ + 2));
}

double BallSolution::operator()(const Point& x) const {
  const double s = distance(x, center_, n_);
  return k_ * (std::pow(radius_, n_ + 2) - std::pow(s, n_ + 2));
}

double BallSolution::radial_derivative(double s) const {
  return -k_ * (n_ + 2) * std::pow(s, n_ + 1);
}

Point BallSolution::gradient(const Point& x) const {
  // grad = -k (n+2) s^n (x - c)
  const double s = distance(x, center_, n_);
  const double f = -k_ * (n_ + 2) * std::pow(s, n_);
  Point g{};
  for (int d = 0; d < n_; ++d) g[d] = f * (x[d] - center_[d]);
  return g;
}

std::vector<double> BallSolution::sample_interior(const Grid& grid) const {
  std::vector<double> out;
  out.reserve(grid.interior_count());
  for (std::size_t node : grid.interior_nodes()) out.push_back((*this)(grid.position(node)));
  return out;
}

BallSolution exact_ball_solution(const Point& center, double radius, int dimension,
                                 const EllipticOperator& op) {
  double scale = 1.0;
  if (op.kind() == EllipticOperator::Kind::PucciMinus) scale = 1.0 / op.Lambda();
  if (op.kind() == EllipticOperator::Kind::PucciPlus) scale = 1.0 / op.lambda();
  return BallSolution(center, radius, dimension, scale);
}

BallSolution exact_ball_solution(const BallDomain& ball, const EllipticOperator& op) {
  return exact_ball_solution(ball.center, ball.radius, ball.dimension, op);
}

double barrier_gradient_constant(double eps0, int dimension, double Lambda) {
  if (!(eps0 > 0.0)) throw InvalidParameter("barrier constant: eps0 must be positive");
  if (!(Lambda > 0.0)) throw InvalidParameter("barrier constant: Lambda must be positive");
  return unit_ball_volume(dimension) * std::pow(eps0, dimension + 1) / (2.0 * dimension * Lambda);
}

double boundary_gradient_min(std::span<const double> u, const Discretization& disc, double band) {
  const Grid& grid = disc.grid();
  if (band < 2.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw InvalidParameter("boundary_gradient_min: band must be at least 2h");
  }
  if (u.size() != grid.interior_count()) {
    throw InvalidParameter("boundary_gradient_min: field size does not match the grid");
  }
  const int n = grid.dimension();
  double best = std::numeric_limits<double>::infinity();
  const auto nodes = grid.interior_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (grid.boundary_distance(grid.position(nodes[i])) >= band) continue;
    double s = 0.0;
    for (int d = 0; d < n; ++d) {
      const double g = disc.derivative(i, d, u);
      s += g * g;
    }
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

BarrierReport barrier_comparison_check(std::span<const double> u, const Discretization& disc,
                                       const EllipticOperator& op, double eps0,
                                       const BarrierOptions& opts) {
  const Grid& grid = disc.grid();
  const int n = grid.dimension();
  if (!(eps0 > 0.0)) throw InvalidParameter("barrier check: eps0 must be positive");
  if (u.size() != grid.interior_count()) {
    throw InvalidParameter("barrier check: field size does not match the grid");
  }
  if (std::holds_alternative<BoxDomain>(grid.domain())) {
    throw PreconditionError("barrier check needs a ball or annulus: box corners admit no inner "
                            "tangent ball");
  }
  const double omega = unit_ball_volume(n);
  const double total = domain_measure(grid);
  if (omega * std::pow(eps0, n) > 0.5 * total) {
    throw PreconditionError("barrier check: |B_eps0| exceeds |Omega| / 2");
  }

  // Tangent balls: (boundary point, ball center, inner sphere flag).
  struct Site {
    Point x0, y;
    bool inner;
  };
  std::vector<Site> sites;
  double reference_radius = 0.0;
  const auto dirs = sample_directions(n);
  if (const auto* b = std::get_if<BallDomain>(&grid.domain())) {
    reference_radius = b->radius;
    for (const Point& d : dirs) {
      sites.push_back({along(b->center, d, b->radius), along(b->center, d, b->radius - eps0), false});
    }
  } else {
    const auto& a = std::get<AnnulusDomain>(grid.domain());
    if (2.0 * eps0 > a.r_out - a.r_in) {
      throw PreconditionError("barrier check: annulus width is below 2 eps0");
    }
    reference_radius = a.r_out - a.r_in;
    for (const Point& d : dirs) {
      sites.push_back({along(a.center, d, a.r_out), along(a.center, d, a.r_out - eps0), false});
      sites.push_back({along(a.center, d, a.r_in), along(a.center, d, a.r_in + eps0), true});
    }
  }

  BarrierReport rep;
  rep.eps0 = eps0;
  rep.Lambda = op.Lambda();
  rep.c0 = barrier_gradient_constant(eps0, n, rep.Lambda);
  rep.tolerance = opts.tolerance;
  rep.gradient_factor = opts.gradient_factor;
  rep.band = opts.band > 0.0 ? opts.band : std::max(2.0 * grid.spacing(), 0.1 * reference_radius);

  const auto mu = superlevel_measures(u, grid.cell_measure(), TieRule::Closed);
  const double k = omega / (2.0 * n * (n + 2) * rep.Lambda);
  const double top = std::pow(eps0, n + 2);
  const auto nodes = grid.interior_nodes();
  for (const Site& s : sites) {
    BarrierPoint p;
    p.boundary_point = s.x0;
    p.ball_center = s.y;
    p.inner_sphere = s.inner;
    p.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double r = distance(grid.position(nodes[i]), s.y, n);
      if (r >= eps0) continue;
      ++p.nodes;
      p.min_margin = std::min(p.min_margin, u[i] - k * (top - std::pow(r, n + 2)));
      if (mu[i] < 0.5 * total) p.measure_hypothesis = false;
    }
    p.passed = p.nodes == 0 || p.min_margin >= -opts.tolerance;
    rep.comparison_passed = rep.comparison_passed && p.passed;
    rep.measure_hypothesis = rep.measure_hypothesis && p.measure_hypothesis;
    rep.points.push_back(p);
  }
  rep.gradient_min = boundary_gradient_min(u, disc, rep.band);
  rep.gradient_passed = rep.gradient_min >= opts.gradient_factor * rep.c0;
  return rep;
}

std::vector<FlatLevel> flat_region_detector(std::span<const double> values, double cell,
                                            double delta, std::size_t max_levels) {
  if (!(delta > 0.0)) throw InvalidParameter("flat_region_detector: delta must be positive");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();

  // Window counts #{|v_j - v_i| <= delta} by two pointers over the sorted values.
  std::vector<std::size_t> count(n);
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (v[lo] < v[i] - delta) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < n && v[hi + 1] <= v[i] + delta) ++hi;
    count[i] = hi - lo + 1;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });

  std::vector<FlatLevel> out;
  std::set<double> picked;
  for (std::size_t i : order) {
    if (out.size() >= max_levels) break;
    const double a = v[i];
    // No picked level within 2 delta: windows stay disjoint.
    auto it = picked.lower_bound(a - 2.0 * delta);
    if (it != picked.end() && *it <= a + 2.0 * delta) continue;
    picked.insert(a);
    out.push_back({a, count[i], cell * static_cast<double>(count[i])});
  }
  return out;
}

FlatThreshold calibrate_flat_threshold(const BallDomain& ball, const EllipticOperator& op,
                                       std::span<const double> hs,
                                       std::span<const double> deltas, double safety) {
  if (hs.empty() || hs.size() != deltas.size()) {
    throw InvalidParameter("calibrate_flat_threshold: need one delta per h");
  }
  const BallSolution exact = exact_ball_solution(ball, op);
  double c = 0.0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const Grid grid = build_ball(ball.center, ball.radius, hs[k], ball.dimension);
    const auto levels = flat_region_detector(exact.sample_interior(grid), grid.cell_measure(),
                                             deltas[k], 1);
    const double mass = levels.empty() ? 0.0 : levels.front().measure;
    c = std::max(c, mass / (deltas[k] + hs[k]));
  }
  return {safety * c};
}

bool StudyResult::all_converged() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const StudyRow& r) { return r.status == SolveStatus::Converged; });
}

StudyResult convergence_order_study(const StudyProblem& problem, std::span<const double> hs) {
  for (double h : hs) {
    if (!(h > 0.0)) throw InvalidParameter("convergence study: h must be positive");
  }
  const BallSolution exact = exact_ball_solution(problem.ball, problem.op);
  const ProfileFunction g = ProfileFunction::linear(-1.0, 0.0);

  auto run = [&](double h) {
    const auto start = std::chrono::steady_clock::now();
    const Grid grid = build_ball(problem.ball.center, problem.ball.radius, h,
                                 problem.ball.dimension);
    const Discretization disc(grid, BoundaryData(ZeroBoundary{}));
    const NonlocalSolution sol = solve_nonlocal(problem.op, disc, g, problem.solver);
    StudyRow row;
    row.h = h;
    row.nodes = grid.interior_count();
    const auto u = sol.u.interior_values(grid);
    const auto ref = exact.sample_interior(grid);
    for (std::size_t i = 0; i < u.size(); ++i) row.error = std::max(row.error, std::abs(u[i] - ref[i]));
    row.status = sol.report.status;
    row.iterations = static_cast<int>(sol.report.records.size());
    row.residual = sol.report.residual.all;
    row.report = sol.report;
    row.u = u;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  };

  std::vector<std::future<StudyRow>> jobs;
  jobs.reserve(hs.size());
  for (double h : hs) jobs.push_back(std::async(std::launch::async, run, h));
  StudyResult out;
  for (auto& j : jobs) out.rows.push_back(j.get());
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    out.rows[k].order = k == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : std::log2(out.rows[k - 1].error / out.rows[k].error);
  }
  return out;
}

}  // namespace nlfp
