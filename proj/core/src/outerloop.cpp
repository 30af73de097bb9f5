#include "nlfp/outerloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "nlfp/error.hpp"

namespace nlfp {

void OuterConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
  };
  require(eps0 >= 0.0 && std::isfinite(eps0), "eps0 must be >= 0 (0 selects the relative default)");
  require(eps0_rel > 0.0 && std::isfinite(eps0_rel), "eps0_rel must be positive");
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(eps_min_rel > 0.0 && eps_min_rel < 1.0, "eps_min_rel must lie in (0, 1)");
  require(eps0 > 0.0 || eps0_rel > eps_min_rel, "eps0 must exceed eps_min");
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
  require(stage_tolerance > 0.0, "stage tolerance must be positive");
  require(outer_tolerance > 0.0, "outer tolerance must be positive");
  require(residual_tolerance >= 0.0, "residual tolerance must be >= 0");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(stage_max_iterations >= 1, "stage_max_iterations must be >= 1");
  require(anderson_depth >= 0 && anderson_depth <= 50, "anderson_depth must lie in [0, 50]");
  require(krylov_max_iterations >= 1, "krylov_max_iterations must be >= 1");
  require(tie_tolerance >= 0.0 && tie_tolerance < 1e-3, "tie tolerance must lie in [0, 1e-3)");
  require(inner.sigma > 0.0 && inner.sigma <= 1.0, "pseudo-time sigma must lie in (0, 1]");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::InnerFailure: return "InnerFailure";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::Stalled: return "Stalled";
  }
  return "?";
}

namespace {

double oscillation(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// max |d_i - d_j| / |x_i - x_j| over stencil arms; d vanishes on the boundary.
double lipschitz_seminorm(std::span<const double> d, const Grid& grid) {
  const double h = grid.spacing();
  double m = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (int axis = 0; axis < grid.dimension(); ++axis) {
      for (int side = 0; side < 2; ++side) {
        const Arm& arm = grid.arm(i, axis, side);
        const double other = arm.neighbor >= 0 ? d[static_cast<std::size_t>(arm.neighbor)] : 0.0;
        m = std::max(m, std::abs(d[i] - other) / (arm.theta * h));
      }
    }
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> band_mask(const Discretization& disc) {
  const Grid& grid = disc.grid();
  const double width = 2.0 * grid.spacing();
  std::vector<std::uint8_t> band(grid.interior_count());
  for (std::size_t i = 0; i < band.size(); ++i) {
    const Point x = grid.position(grid.interior_nodes()[i]);
    band[i] = static_cast<std::uint8_t>(grid.boundary_distance(x) < width || !disc.full_stencil(i));
  }
  return band;
}

ResidualSplit plain_residual(std::span<const double> u, const EllipticOperator& op,
                             const Discretization& disc, const ProfileFunction& g, TieRule rule,
                             double tie_tolerance) {
  const Grid& grid = disc.grid();
  const auto levels = canonicalize_levels(u, tie_tolerance);
  const auto f = rhs_plain(levels, grid.cell_measure(), g, rule);
  const auto Fu = apply_operator(op, disc, u);
  const auto band = band_mask(disc);
  ResidualSplit r;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double e = std::abs(Fu[i] - f[i]);
    r.all = std::max(r.all, e);
    if (band[i]) {
      r.band = std::max(r.band, e);
    } else {
      r.core = std::max(r.core, e);
    }
  }
  return r;
}

ResidualSplit plain_residual(const ScalarField& u, const EllipticOperator& op,
                             const Discretization& disc, const ProfileFunction& g, TieRule rule,
                             double tie_tolerance) {
  u.check_grid(disc.grid());
  return plain_residual(u.interior_values(disc.grid()), op, disc, g, rule, tie_tolerance);
}

double abp_bound(const EllipticOperator& op, const Discretization& disc,
                 const ProfileFunction& g) {
  const Grid& grid = disc.grid();
  const int n = grid.dimension();
  const auto [lo, hi] = boundary_range(grid, disc.boundary());
  const double omega = continuum_measure(BallDomain{n, {}, 1.0});
  const double c = domain_diameter(grid.domain()) / (n * std::pow(omega, 1.0 / n) * op.lambda());
  const double measure = domain_measure(grid);
  return std::max(std::abs(lo), std::abs(hi)) +
         c * std::pow(measure, 1.0 / n) * g.max_abs(measure);
}

StepResult fixed_point_step(std::span<const double> v, double eps, double theta,
                            const Discretization& disc, const ProfileFunction& g,
                            DirichletSolver& solver, TieRule rule, double tie_tolerance) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidParameter("damping must lie in (0, 1]");
  const double cell = disc.grid().cell_measure();
  const auto levels = canonicalize_levels(v, tie_tolerance);
  StepResult out;
  out.collapsed = eps < LevelStats(levels, cell).min_positive_gap();
  const auto f = rhs_smoothed(levels, cell, g, eps, rule);
  out.inner = solver.solve(f, v);
  out.t = out.inner.u;
  out.v = out.t;
  if (theta < 1.0) {
    for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = (1.0 - theta) * v[i] + theta * out.t[i];
  }
  return out;
}

ScalarField fixed_point_step(const ScalarField& v, double eps, double theta,
                             const EllipticOperator& op, const Discretization& disc,
                             const ProfileFunction& g, const OuterConfig& cfg) {
  const Grid& grid = disc.grid();
  v.check_grid(grid);
  DirichletSolver solver(disc, op, cfg.inner);
  const auto step = fixed_point_step(v.interior_values(grid), eps, theta, disc, g, solver,
                                     cfg.tie_rule, cfg.tie_tolerance);
  ScalarField out = ScalarField::from_interior(grid, step.v);
  apply_boundary(out, grid, disc.boundary());
  return out;
}

const char* to_string(OuterMethod m) {
  switch (m) {
    case OuterMethod::Newton: return "newton";
    case OuterMethod::Anderson: return "anderson";
    case OuterMethod::Picard: return "picard";
  }
  return "?";
}

namespace {

// Anderson mixing on the fixed-point residual r = T(x) - x:
//   x+ = x + beta r - (dX + beta dR) gamma,  gamma = argmin |r - dR gamma|_2
class Anderson {
 public:
  Anderson(int depth, double beta) : depth_(depth), beta_(beta) {}

  void reset() {
    dx_.clear();
    dr_.clear();
    has_prev_ = false;
  }

  std::vector<double> next(const std::vector<double>& x, const std::vector<double>& r) {
    const std::size_t n = x.size();
    if (has_prev_ && depth_ > 0) {
      std::vector<double> dx(n), dr(n);
      for (std::size_t i = 0; i < n; ++i) {
        dx[i] = x[i] - x_prev_[i];
        dr[i] = r[i] - r_prev_[i];
      }
      dx_.push_back(std::move(dx));
      dr_.push_back(std::move(dr));
      if (static_cast<int>(dx_.size()) > depth_) {
        dx_.erase(dx_.begin());
        dr_.erase(dr_.begin());
      }
    }
    x_prev_ = x;
    r_prev_ = r;
    has_prev_ = true;

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + beta_ * r[i];
    const auto m = static_cast<Eigen::Index>(dr_.size());
    if (m == 0) return out;
    Eigen::MatrixXd R(static_cast<Eigen::Index>(n), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) R(static_cast<Eigen::Index>(i), j) = dr_[j][i];
    }
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
    qr.setThreshold(1e-10);
    const Eigen::VectorXd gamma = qr.solve(rv);
    if (!gamma.allFinite()) return out;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double gj = gamma(j);
      for (std::size_t i = 0; i < n; ++i) out[i] -= gj * (dx_[j][i] + beta_ * dr_[j][i]);
    }
    return out;
  }

 private:
  int depth_;
  double beta_;
  std::vector<std::vector<double>> dx_, dr_;
  std::vector<double> x_prev_, r_prev_;
  bool has_prev_ = false;
};

// Derivative of v -> g(smoothed measure of v) at fixed level order. The
// window of node i is the run of values in (v_i - eps, v_i), contiguous in
// descending order, so one product costs a prefix sum.
class SmoothedRhsDerivative {
 public:
  SmoothedRhsDerivative(std::span<const double> levels, double cell, double eps,
                        const ProfileFunction& g, TieRule rule)
      : order_(levels.size()), lo_(levels.size()), hi_(levels.size()),
        weight_(levels.size()) {
    const std::size_t n = levels.size();
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return levels[a] > levels[b]; });
    std::vector<double> sorted(n);
    for (std::size_t p = 0; p < n; ++p) sorted[p] = levels[order_[p]];
    const auto mu = smoothed_superlevel_average(levels, cell, eps, rule);
    const double total = cell * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double top = levels[i];
      lo_[i] = static_cast<std::size_t>(
          std::partition_point(sorted.begin(), sorted.end(), [&](double x) { return x >= top; }) -
          sorted.begin());
      hi_[i] = static_cast<std::size_t>(
          std::partition_point(sorted.begin(), sorted.end(),
                               [&](double x) { return x > top - eps; }) -
          sorted.begin());
      hi_[i] = std::max(hi_[i], lo_[i]);
      const double m = std::clamp(mu[i], 0.0, total);
      weight_[i] = (mu[i] >= 0.0 && mu[i] <= total) ? g.derivative(m) * cell / eps : 0.0;
    }
  }

  bool trivial() const {
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (hi_[i] > lo_[i] && weight_[i] != 0.0) return false;
    }
    return true;
  }

  void apply(std::span<const double> w, std::span<double> out) const {
    const std::size_t n = w.size();
    prefix_.assign(n + 1, 0.0);
    for (std::size_t p = 0; p < n; ++p) prefix_[p + 1] = prefix_[p] + w[order_[p]];
    for (std::size_t i = 0; i < n; ++i) {
      const double run = prefix_[hi_[i]] - prefix_[lo_[i]];
      out[i] = weight_[i] * (run - static_cast<double>(hi_[i] - lo_[i]) * w[i]);
    }
  }

 private:
  std::vector<std::size_t> order_, lo_, hi_;
  std::vector<double> weight_;
  mutable std::vector<double> prefix_;
};

// Unrestarted GMRES for A x = b, A given as a callback. Returns the iterate
// with the smallest residual found and the iteration count.
template <class Apply>
std::pair<std::vector<double>, int> gmres(const Apply& apply, const std::vector<double>& b,
                                          int max_iter, double rel_tol) {
  const std::size_t n = b.size();
  auto dot = [n](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };
  const double beta = std::sqrt(dot(b, b));
  std::vector<double> x(n, 0.0);
  if (beta == 0.0) return {x, 0};
  const auto m = static_cast<std::size_t>(max_iter);
  std::vector<std::vector<double>> V;
  V.reserve(m + 1);
  V.push_back(b);
  for (double& e : V[0]) e /= beta;
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), e1(m + 1, 0.0);
  e1[0] = beta;
  std::size_t k = 0;
  std::vector<double> w(n);
  for (; k < m; ++k) {
    apply(V[k], w);
    for (std::size_t j = 0; j <= k; ++j) {
      H[j][k] = dot(w, V[j]);
      for (std::size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
    }
    H[k + 1][k] = std::sqrt(dot(w, w));
    for (std::size_t j = 0; j < k; ++j) {
      const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
      H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
      H[j][k] = t;
    }
    const double r = std::hypot(H[k][k], H[k + 1][k]);
    cs[k] = r == 0.0 ? 1.0 : H[k][k] / r;
    sn[k] = r == 0.0 ? 0.0 : H[k + 1][k] / r;
    const double sub = H[k + 1][k];
    H[k][k] = r;
    H[k + 1][k] = 0.0;
    e1[k + 1] = -sn[k] * e1[k];
    e1[k] = cs[k] * e1[k];
    const bool done = std::abs(e1[k + 1]) <= rel_tol * beta || sub == 0.0;
    if (!done && k + 1 < m) {
      V.emplace_back(n);
      for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / sub;
    }
    if (done) {
      ++k;
      break;
    }
  }
  const std::size_t dim = std::min(k, m);
  std::vector<double> y(dim);
  for (std::size_t j = dim; j-- > 0;) {
    double s = e1[j];
    for (std::size_t l = j + 1; l < dim; ++l) s -= H[j][l] * y[l];
    y[j] = H[j][j] != 0.0 ? s / H[j][j] : 0.0;
  }
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
  }
  return {x, static_cast<int>(dim)};
}

}  // namespace

NonlocalSolution solve_nonlocal(const EllipticOperator& op, const Discretization& disc,
                                const ProfileFunction& g, const OuterConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  cfg.validate();
  const Grid& grid = disc.grid();
  const std::size_t count = grid.interior_count();
  const double cell = grid.cell_measure();
  g.check_domain(domain_measure(grid));

  DirichletSolver solver(disc, op, cfg.inner);
  SolveReport rep;
  rep.initial_guess = cfg.initial_guess;
  rep.method = cfg.method;
  rep.tie_rule = cfg.tie_rule;
  rep.inner_method = solver.method();
  rep.inner_tolerance = solver.tolerance();
  rep.residual_tolerance = cfg.residual_tolerance > 0.0 ? cfg.residual_tolerance : grid.spacing();
  rep.bound = abp_bound(op, disc, g);

  auto finish = [&](std::vector<double> u) {
    rep.residual = plain_residual(u, op, disc, g, cfg.tie_rule, cfg.tie_tolerance);
    rep.sup_norm = sup_abs(u);
    ScalarField field = ScalarField::from_interior(grid, u);
    apply_boundary(field, grid, disc.boundary());
    return NonlocalSolution{std::move(field), std::move(rep)};
  };

  std::vector<double> v;
  const std::vector<double> zero(count, 0.0);
  try {
    v = solver.solve(zero).u;
  } catch (const NonConvergence& e) {
    rep.status = SolveStatus::InnerFailure;
    rep.message = std::string("initial homogeneous solve: ") + e.what();
    return finish(zero);
  }

  const bool constant_g = g.is_constant();
  double scale = oscillation(v);
  if (scale == 0.0 && !constant_g) {
    // Flat initial guess (psi constant): take the scale from one plain map.
    try {
      const auto f = rhs_plain(v, cell, g, cfg.tie_rule);
      scale = oscillation(solver.solve(f, v).u);
    } catch (const NonConvergence& e) {
      rep.status = SolveStatus::InnerFailure;
      rep.message = std::string("scale probe: ") + e.what();
      return finish(v);
    }
  }
  if (scale == 0.0) scale = 1.0;  // T maps v0 to itself; any scale terminates at once
  rep.scale = scale;
  rep.eps0 = cfg.eps0 > 0.0 ? cfg.eps0 : cfg.eps0_rel * scale;
  rep.eps_min = cfg.eps_min_rel * scale;

  // With g constant T does not depend on v: one undamped step is exact.
  const double theta = constant_g ? 1.0 : cfg.damping;
  const OuterMethod method = constant_g ? OuterMethod::Picard : cfg.method;
  Anderson mixer(method == OuterMethod::Anderson ? cfg.anderson_depth : 0, theta);
  double eps = rep.eps0;
  double prev_fpr = std::numeric_limits<double>::infinity();
  int stage = 0;
  int stage_iter = 0;
  bool settled = false;
  std::vector<double> last_t = v;
  auto stage_start = Clock::now();
  const double bound_slack = rep.bound * (1.0 + 1e-9) + 1e-12;
  auto close_stage = [&] {
    rep.stage_seconds.push_back(std::chrono::duration<double>(Clock::now() - stage_start).count());
    stage_start = Clock::now();
  };
  auto stop = [&](SolveStatus status, std::string message) {
    rep.status = status;
    rep.message = std::move(message);
    close_stage();
    rep.stages = stage + 1;
    rep.final_eps = eps;
    return finish(last_t);
  };

  // Last settled stage: the fallback when a smaller eps does not settle.
  struct Anchor {
    std::vector<double> t;
    double eps = 0.0;
    double fpr = 0.0;
  };
  std::optional<Anchor> anchor;

  // A Newton trial v = base + lambda * dir awaiting its residual.
  struct Trial {
    std::vector<double> base, base_r, dir;
    double base_fpr = 0.0;
    double lambda = 1.0;
  };
  std::optional<Trial> trial;
  char next_kind = 'S';

  for (int k = 0; k < cfg.max_iterations; ++k) {
    const auto levels = canonicalize_levels(v, cfg.tie_tolerance);
    const bool collapsed = eps < LevelStats(levels, cell).min_positive_gap();
    InnerResult inner;
    try {
      inner = solver.solve(rhs_smoothed(levels, cell, g, eps, cfg.tie_rule), v);
    } catch (const NonConvergence& e) {
      return stop(SolveStatus::InnerFailure,
                  "inner solve at outer iteration " + std::to_string(k) + ": " + e.what());
    }
    ++stage_iter;
    std::vector<double> r(count);
    for (std::size_t i = 0; i < count; ++i) r[i] = inner.u[i] - v[i];

    IterationRecord rec;
    rec.k = k;
    rec.stage = stage;
    rec.eps = eps;
    rec.damping = theta;
    rec.step = next_kind;
    rec.fixed_point_residual = sup_abs(r);
    rec.inner_residual = inner.residual;
    rec.inner_iterations = inner.iterations;
    rec.plain_residual = plain_residual(inner.u, op, disc, g, cfg.tie_rule, cfg.tie_tolerance).all;
    rec.collapsed = collapsed;
    last_t = std::move(inner.u);
    rep.final_fixed_point_residual = rec.fixed_point_residual;

    if (std::max(sup_abs(v), sup_abs(last_t)) > bound_slack) {
      rep.records.push_back(rec);
      return stop(SolveStatus::Diverged,
                  "iterate left the a priori bound at outer iteration " + std::to_string(k));
    }

    const bool final_stage = constant_g || collapsed || eps <= rep.eps_min;
    std::vector<double> next;
    if (rec.fixed_point_residual <= (final_stage ? cfg.outer_tolerance : cfg.stage_tolerance)) {
      if (final_stage) {
        settled = true;
        rep.records.push_back(rec);
        break;
      }
      // Settled. In-window level differences scale with eps, so the next stage
      // starts from the linear extrapolation in eps through the last two
      // settled points.
      next = last_t;
      if (anchor && anchor->eps == eps / cfg.rho) {
        const double c = (1.0 - cfg.rho) / (1.0 / cfg.rho - 1.0);
        for (std::size_t i = 0; i < count; ++i) next[i] += c * (last_t[i] - anchor->t[i]);
      }
      anchor = Anchor{last_t, eps, rec.fixed_point_residual};
      close_stage();
      eps *= cfg.rho;
      ++stage;
      stage_iter = 0;
      mixer.reset();
      trial.reset();
      prev_fpr = std::numeric_limits<double>::infinity();
      next_kind = 'S';
    } else if (anchor && stage_iter >= cfg.stage_max_iterations) {
      // This eps does not settle within budget: end at the last one that did.
      rep.records.push_back(rec);
      last_t = anchor->t;
      eps = anchor->eps;
      rep.final_fixed_point_residual = anchor->fpr;
      rep.continuation_stopped = true;
      settled = true;
      break;
    } else if (method == OuterMethod::Newton) {
      bool fresh = true;
      if (trial) {
        if (rec.fixed_point_residual < (1.0 - 1e-4 * trial->lambda) * trial->base_fpr) {
          trial.reset();  // accepted
        } else if (trial->lambda > 1.0 / 32.0) {
          trial->lambda *= 0.5;
          next = trial->base;
          for (std::size_t i = 0; i < count; ++i) next[i] += trial->lambda * trial->dir[i];
          next_kind = 'L';
          fresh = false;
        } else {
          // Line search exhausted: damped step from the base point.
          next = trial->base;
          for (std::size_t i = 0; i < count; ++i) next[i] += theta * trial->base_r[i];
          trial.reset();
          next_kind = 'P';
          fresh = false;
        }
      }
      if (fresh) {
        // Solve (I - L^{-1} G') d = r, G' the derivative of the smoothed
        // right-hand side at the current level order.
        const SmoothedRhsDerivative dg(levels, cell, eps, g, cfg.tie_rule);
        std::vector<double> dir;
        if (dg.trivial()) {
          dir = r;
        } else {
          std::vector<double> tmp(count);
          auto apply = [&](const std::vector<double>& w, std::vector<double>& out) {
            dg.apply(w, tmp);
            const auto z = solver.solve_linearized(tmp);
            for (std::size_t i = 0; i < count; ++i) out[i] = w[i] - z[i];
          };
          auto [x, its] = gmres(apply, r, cfg.krylov_max_iterations, 1e-6);
          dir = std::move(x);
          rec.krylov_iterations = its;
        }
        next = v;
        for (std::size_t i = 0; i < count; ++i) next[i] += dir[i];
        trial = Trial{v, r, std::move(dir), rec.fixed_point_residual, 1.0};
        next_kind = 'N';
      }
    } else {
      if (rec.fixed_point_residual > 2.0 * prev_fpr) mixer.reset();
      prev_fpr = rec.fixed_point_residual;
      next = mixer.next(v, r);
      next_kind = method == OuterMethod::Anderson ? 'A' : 'P';
    }
    rec.increment = max_diff(next, v);
    std::vector<double> delta(count);
    for (std::size_t i = 0; i < count; ++i) delta[i] = next[i] - v[i];
    rec.lipschitz = lipschitz_seminorm(delta, grid);
    rep.final_increment = rec.increment;
    rep.records.push_back(rec);
    v = std::move(next);
  }
  close_stage();
  rep.stages = stage + 1;
  rep.final_eps = eps;

  // The returned field is the last T(v): it solves its own frozen problem to
  // inner tolerance.
  NonlocalSolution sol = finish(std::move(last_t));
  SolveReport& out = sol.report;
  if (!settled) {
    out.status = SolveStatus::MaxIterations;
    out.message = "outer iteration cap " + std::to_string(cfg.max_iterations) + " reached";
  } else if (out.residual.all > out.residual_tolerance) {
    out.status = SolveStatus::Stalled;
    out.message = "fixed point settled but the plain residual exceeds its tolerance";
  } else {
    out.status = SolveStatus::Converged;
  }
  return sol;
}

}  // namespace nlfp
