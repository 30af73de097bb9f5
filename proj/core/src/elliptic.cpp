#include "nlfp/elliptic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlfp/error.hpp"

namespace nlfp {

// SymMatrix / eigenvalues

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

namespace {

struct EigenPairs {
  std::array<double, 3> values{};
  // columns are eigenvectors
  std::array<std::array<double, 3>, 3> vectors{};
};

EigenPairs eigen_decompose(const SymMatrix& m) {
  EigenPairs out;
  if (m.n == 1) {
    out.values[0] = m(0, 0);
    out.vectors[0][0] = 1.0;
    return out;
  }
  if (m.n == 2) {
    Eigen::Matrix2d a;
    a << m(0, 0), m(0, 1), m(1, 0), m(1, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(a);
    for (int k = 0; k < 2; ++k) {
      out.values[k] = es.eigenvalues()(k);
      for (int r = 0; r < 2; ++r) out.vectors[k][r] = es.eigenvectors()(r, k);
    }
    return out;
  }
  Eigen::Matrix3d a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = m(r, c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
  for (int k = 0; k < 3; ++k) {
    out.values[k] = es.eigenvalues()(k);
    for (int r = 0; r < 3; ++r) out.vectors[k][r] = es.eigenvectors()(r, k);
  }
  return out;
}

}  // namespace

std::array<double, 3> eigenvalues(const SymMatrix& m) {
  if (m.n == 2) {
    const double mid = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double rad = std::hypot(half, m(0, 1));
    return {mid - rad, mid + rad, 0.0};
  }
  return eigen_decompose(m).values;
}

// EllipticOperator

EllipticOperator EllipticOperator::laplacian() { return {Kind::Laplacian, 1.0, 1.0}; }

namespace {
void check_constants(double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda) || !std::isfinite(Lambda)) {
    throw InvalidParameter("ellipticity constants need 0 < lambda <= Lambda");
  }
}
}  // namespace

EllipticOperator EllipticOperator::pucci_minus(double lambda, double Lambda) {
  check_constants(lambda, Lambda);
  return {Kind::PucciMinus, lambda, Lambda};
}

EllipticOperator EllipticOperator::pucci_plus(double lambda, double Lambda) {
  check_constants(lambda, Lambda);
  return {Kind::PucciPlus, lambda, Lambda};
}

double EllipticOperator::operator()(const SymMatrix& m) const {
  if (kind_ == Kind::Laplacian) return m.trace();
  const auto e = eigenvalues(m);
  const double pos_w = kind_ == Kind::PucciMinus ? lambda_ : Lambda_;
  const double neg_w = kind_ == Kind::PucciMinus ? Lambda_ : lambda_;
  double pos = 0.0;
  double neg = 0.0;
  for (int k = 0; k < m.n; ++k) {
    if (e[k] > 0.0) {
      pos += e[k];
    } else {
      neg += e[k];
    }
  }
  return pos_w * pos + neg_w * neg;
}

double EllipticOperator::evaluate_with_policy(const SymMatrix& m, SymMatrix& policy) const {
  policy = SymMatrix{};
  policy.n = m.n;
  if (kind_ == Kind::Laplacian) {
    for (int i = 0; i < m.n; ++i) policy(i, i) = 1.0;
    return m.trace();
  }
  const EigenPairs ep = eigen_decompose(m);
  const double pos_w = kind_ == Kind::PucciMinus ? lambda_ : Lambda_;
  const double neg_w = kind_ == Kind::PucciMinus ? Lambda_ : lambda_;
  double value = 0.0;
  for (int k = 0; k < m.n; ++k) {
    const double w = ep.values[k] > 0.0 ? pos_w : neg_w;
    value += w * ep.values[k];
    const auto& q = ep.vectors[k];
    for (int r = 0; r < m.n; ++r) {
      for (int c = 0; c < m.n; ++c) policy(r, c) += w * q[r] * q[c];
    }
  }
  return value;
}

// Discretization

int Discretization::entry_index(int d, int e) {
  if (d > e) std::swap(d, e);
  if (d == e) return d;
  if (d == 0) return e == 1 ? 3 : 4;
  return 5;
}

namespace {

// Collects weights for one Hessian entry, merging repeated columns.
struct EntryBuilder {
  std::vector<Discretization::Term> terms;
  double constant = 0.0;

  void add(std::int32_t col, double w) {
    for (auto& t : terms) {
      if (t.col == col) {
        t.weight += w;
        return;
      }
    }
    terms.push_back({col, w});
  }
};

// Value carried by a lattice node for stencil purposes.
struct NodeValue {
  bool available = false;
  std::int32_t col = -1;  // >= 0 for an unknown
  double value = 0.0;     // Dirichlet value otherwise
};

}  // namespace

Discretization::Discretization(const Grid& grid, BoundaryData psi)
    : grid_(&grid), psi_(std::move(psi)) {
  const int n = grid.dimension();
  const double h = grid.spacing();
  const double h2 = h * h;
  const std::size_t count = grid.interior_count();
  offsets_.assign(count * kEntries + 1, 0);
  constants_.assign(count * kEntries, 0.0);
  full_.assign(count, 1);

  auto axis_value = [&](std::size_t i, int axis, int side) {
    const Arm& arm = grid.arm(i, axis, side);
    NodeValue v;
    if (arm.neighbor >= 0) {
      v.available = true;
      v.col = arm.neighbor;
    } else if (arm.theta == 1.0) {
      v.available = true;
      v.value = psi_(arm.boundary_point);
    }
    return v;
  };
  auto lattice_value = [&](const Index& idx) {
    NodeValue v;
    if (!grid.in_lattice(idx)) return v;
    const std::size_t node = grid.node_at(idx);
    switch (grid.node_class(node)) {
      case NodeClass::Interior:
        v.available = true;
        v.col = grid.interior_index(node);
        break;
      case NodeClass::Boundary:
        v.available = true;
        v.value = psi_(grid.position(node));
        break;
      case NodeClass::Exterior:
        break;
    }
    return v;
  };

  std::vector<EntryBuilder> entries(kEntries);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& eb : entries) {
      eb.terms.clear();
      eb.constant = 0.0;
    }
    const auto self = static_cast<std::int32_t>(i);
    const Index idx = grid.index_of(grid.interior_nodes()[i]);

    for (int d = 0; d < n; ++d) {
      EntryBuilder& eb = entries[static_cast<std::size_t>(entry_index(d, d))];
      const Arm& lo = grid.arm(i, d, 0);
      const Arm& hi = grid.arm(i, d, 1);
      const double sum = lo.theta + hi.theta;
      const double w_hi = 2.0 / (h2 * hi.theta * sum);
      const double w_lo = 2.0 / (h2 * lo.theta * sum);
      eb.add(self, -(w_hi + w_lo));
      for (int side = 0; side < 2; ++side) {
        const Arm& arm = side == 0 ? lo : hi;
        const double w = side == 0 ? w_lo : w_hi;
        if (arm.neighbor >= 0) {
          eb.add(arm.neighbor, w);
        } else {
          eb.constant += w * psi_(arm.boundary_point);
          if (arm.theta != 1.0) full_[i] = 0;
        }
      }
    }

    for (int d = 0; d < n; ++d) {
      for (int e = d + 1; e < n; ++e) {
        EntryBuilder& eb = entries[static_cast<std::size_t>(entry_index(d, e))];
        int quadrants = 0;
        EntryBuilder acc;
        for (int sd = -1; sd <= 1; sd += 2) {
          for (int se = -1; se <= 1; se += 2) {
            const NodeValue a = axis_value(i, d, sd < 0 ? 0 : 1);
            const NodeValue b = axis_value(i, e, se < 0 ? 0 : 1);
            Index cidx = idx;
            cidx[d] += sd;
            cidx[e] += se;
            const NodeValue c = lattice_value(cidx);
            if (!a.available || !b.available || !c.available) continue;
            ++quadrants;
            // s (u_c - u_a - u_b + u_0) / h^2, s = sd * se
            const double s = static_cast<double>(sd * se) / h2;
            auto put = [&](const NodeValue& v, double w) {
              if (v.col >= 0) {
                acc.add(v.col, w);
              } else {
                acc.constant += w * v.value;
              }
            };
            put(c, s);
            put(a, -s);
            put(b, -s);
            acc.add(self, s);
          }
        }
        if (quadrants < 4) full_[i] = 0;
        if (quadrants == 0) continue;  // no usable cross stencil: entry stays 0
        const double scale = 1.0 / quadrants;
        for (const auto& t : acc.terms) {
          if (t.weight != 0.0) eb.add(t.col, t.weight * scale);
        }
        eb.constant += acc.constant * scale;
      }
    }

    for (int k = 0; k < kEntries; ++k) {
      const std::size_t slot = i * kEntries + static_cast<std::size_t>(k);
      const auto& eb = entries[static_cast<std::size_t>(k)];
      offsets_[slot] = terms_.size();
      terms_.insert(terms_.end(), eb.terms.begin(), eb.terms.end());
      constants_[slot] = eb.constant;
    }
  }
  offsets_[count * kEntries] = terms_.size();
}

std::span<const Discretization::Term> Discretization::terms(std::size_t i, int d, int e) const {
  const std::size_t slot = i * kEntries + static_cast<std::size_t>(entry_index(d, e));
  return {terms_.data() + offsets_[slot], offsets_[slot + 1] - offsets_[slot]};
}

double Discretization::constant(std::size_t i, int d, int e) const {
  return constants_[i * kEntries + static_cast<std::size_t>(entry_index(d, e))];
}

SymMatrix Discretization::hessian(std::size_t i, std::span<const double> u) const {
  SymMatrix m;
  m.n = grid_->dimension();
  for (int d = 0; d < m.n; ++d) {
    for (int e = d; e < m.n; ++e) {
      double v = constant(i, d, e);
      for (const Term& t : terms(i, d, e)) v += t.weight * u[static_cast<std::size_t>(t.col)];
      m(d, e) = v;
      m(e, d) = v;
    }
  }
  return m;
}

double Discretization::laplacian_diagonal(std::size_t i) const {
  double diag = 0.0;
  const auto self = static_cast<std::int32_t>(i);
  for (int d = 0; d < grid_->dimension(); ++d) {
    for (const Term& t : terms(i, d, d)) {
      if (t.col == self) diag -= t.weight;
    }
  }
  return diag;
}

double Discretization::derivative(std::size_t i, int axis, std::span<const double> u) const {
  const double h = grid_->spacing();
  const double u0 = u[i];
  auto arm_value = [&](const Arm& arm) {
    return arm.neighbor >= 0 ? u[static_cast<std::size_t>(arm.neighbor)]
                             : psi_(arm.boundary_point);
  };
  const Arm& lo = grid_->arm(i, axis, 0);
  const Arm& hi = grid_->arm(i, axis, 1);
  const double hm = lo.theta * h;
  const double hp = hi.theta * h;
  const double um = arm_value(lo);
  const double up = arm_value(hi);
  return (hm * hm * (up - u0) + hp * hp * (u0 - um)) / (hm * hp * (hm + hp));
}

SymMatrix discrete_hessian(const ScalarField& u, const Discretization& disc, std::size_t node) {
  const Grid& grid = disc.grid();
  const std::int32_t i = grid.interior_index(node);
  if (i < 0) throw InvalidParameter("discrete_hessian needs an Interior node");
  const auto values = u.interior_values(grid);
  return disc.hessian(static_cast<std::size_t>(i), values);
}

std::vector<double> apply_operator(const EllipticOperator& op, const Discretization& disc,
                                   std::span<const double> u) {
  const std::size_t count = disc.grid().interior_count();
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = op(disc.hessian(i, u));
  return out;
}

ScalarField apply_operator(const EllipticOperator& op, const ScalarField& u,
                           const Discretization& disc) {
  const Grid& grid = disc.grid();
  return ScalarField::from_interior(grid, apply_operator(op, disc, u.interior_values(grid)));
}

// Inner solvers

InnerMethod resolve_method(const EllipticOperator& op, InnerMethod requested) {
  if (requested == InnerMethod::Auto) {
    return op.kind() == EllipticOperator::Kind::Laplacian ? InnerMethod::Linear
                                                          : InnerMethod::Newton;
  }
  if (requested == InnerMethod::Linear && op.kind() != EllipticOperator::Kind::Laplacian) {
    throw InvalidParameter("the linear inner method only applies to the Laplacian");
  }
  return requested;
}

double resolve_tolerance(const InnerSolveConfig& cfg, InnerMethod method) {
  if (cfg.tolerance > 0.0) return cfg.tolerance;
  switch (method) {
    case InnerMethod::Linear: return InnerSolveConfig::kLinearTolerance;
    case InnerMethod::Newton: return InnerSolveConfig::kNewtonTolerance;
    default: return InnerSolveConfig::kPseudoTimeTolerance;
  }
}

namespace {
int default_iterations(InnerMethod m) {
  switch (m) {
    case InnerMethod::Linear: return 20;
    case InnerMethod::Newton: return 100;
    default: return 500000;
  }
}
}  // namespace

struct DirichletSolver::Factorization {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

DirichletSolver::DirichletSolver(const Discretization& disc, EllipticOperator op,
                                 InnerSolveConfig cfg)
    : disc_(&disc), op_(op), cfg_(cfg), method_(resolve_method(op, cfg.method)) {
  tol_ = resolve_tolerance(cfg_, method_);
  max_iter_ = cfg_.max_iterations > 0 ? cfg_.max_iterations : default_iterations(method_);
  if (method_ == InnerMethod::PseudoTime && !(cfg_.sigma > 0.0 && cfg_.sigma <= 1.0)) {
    throw InvalidParameter("pseudo-time factor sigma must lie in (0, 1]");
  }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

void DirichletSolver::factorize(const std::vector<SymMatrix>& policy) {
  const std::size_t count = disc_->grid().interior_count();
  const int n = disc_->grid().dimension();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(count * static_cast<std::size_t>(n == 1 ? 3 : n == 2 ? 9 : 19));
  for (std::size_t i = 0; i < count; ++i) {
    const SymMatrix& a = policy[i];
    for (int d = 0; d < n; ++d) {
      for (int e = d; e < n; ++e) {
        const double w = d == e ? a(d, d) : 2.0 * a(d, e);
        if (w == 0.0) continue;
        for (const auto& t : disc_->terms(i, d, e)) {
          trip.emplace_back(static_cast<int>(i), t.col, w * t.weight);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> mat(static_cast<Eigen::Index>(count),
                                  static_cast<Eigen::Index>(count));
  mat.setFromTriplets(trip.begin(), trip.end());
  mat.makeCompressed();
  if (!lu_) lu_ = std::make_unique<Factorization>();
  lu_->lu.compute(mat);
  if (lu_->lu.info() != Eigen::Success) {
    lu_.reset();
    throw NonConvergence("sparse LU factorization failed", {});
  }
}

InnerResult DirichletSolver::solve(std::span<const double> f, std::span<const double> initial) {
  const std::size_t count = disc_->grid().interior_count();
  if (f.size() != count) throw InvalidParameter("right-hand side has the wrong length");
  for (double v : f) {
    if (!std::isfinite(v)) throw InvalidParameter("right-hand side must be finite");
  }
  std::vector<double> u(count, 0.0);
  if (!initial.empty()) {
    if (initial.size() != count) throw InvalidParameter("initial guess has the wrong length");
    std::copy(initial.begin(), initial.end(), u.begin());
  }
  InnerResult res;
  switch (method_) {
    case InnerMethod::Linear: res = solve_linear(f, std::move(u)); break;
    case InnerMethod::Newton: res = solve_newton(f, std::move(u)); break;
    default:
      res = solve_pseudo_time(f, std::move(u));
      lu_.reset();  // linearize afresh at the new solution when asked
      break;
  }
  if (method_ != InnerMethod::Linear) last_u_ = res.u;
  return res;
}

std::vector<double> DirichletSolver::solve_linearized(std::span<const double> rhs) {
  const std::size_t count = disc_->grid().interior_count();
  if (rhs.size() != count) throw InvalidParameter("right-hand side has the wrong length");
  if (!lu_) {
    std::vector<SymMatrix> policy(count);
    if (op_.kind() == EllipticOperator::Kind::Laplacian) {
      for (auto& a : policy) {
        a.n = disc_->grid().dimension();
        for (int d = 0; d < a.n; ++d) a(d, d) = 1.0;
      }
    } else {
      if (last_u_.size() != count) {
        throw PreconditionError("no linearization available before the first solve");
      }
      for (std::size_t i = 0; i < count; ++i) {
        op_.evaluate_with_policy(disc_->hessian(i, last_u_), policy[i]);
      }
    }
    factorize(policy);
  }
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(count));
  const Eigen::VectorXd x = lu_->lu.solve(b);
  return {x.data(), x.data() + x.size()};
}

InnerResult DirichletSolver::solve_linear(std::span<const double> f, std::vector<double> u) {
  const std::size_t count = u.size();
  if (!lu_) {
    SymMatrix identity;
    identity.n = disc_->grid().dimension();
    for (int d = 0; d < identity.n; ++d) identity(d, d) = 1.0;
    factorize(std::vector<SymMatrix>(count, identity));
  }
  InnerResult res;
  Eigen::VectorXd r(static_cast<Eigen::Index>(count));
  for (int k = 0;; ++k) {
    const auto Fu = apply_operator(op_, *disc_, u);
    double rmax = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      r(static_cast<Eigen::Index>(i)) = f[i] - Fu[i];
      rmax = std::max(rmax, std::abs(f[i] - Fu[i]));
    }
    res.history.push_back(rmax);
    if (rmax <= tol_) {
      res.residual = rmax;
      res.iterations = k;
      res.u = std::move(u);
      return res;
    }
    if (k >= max_iter_) {
      throw NonConvergence("linear inner solve: residual " + std::to_string(rmax) +
                               " above tolerance after " + std::to_string(k) + " corrections",
                           res.history);
    }
    const Eigen::VectorXd delta = lu_->lu.solve(r);
    for (std::size_t i = 0; i < count; ++i) u[i] += delta(static_cast<Eigen::Index>(i));
  }
}

InnerResult DirichletSolver::solve_newton(std::span<const double> f, std::vector<double> u) {
  const std::size_t count = u.size();
  std::vector<SymMatrix> policy(count);
  std::vector<double> Fu(count);
  auto evaluate = [&](const std::vector<double>& x, bool with_policy) {
    double rmax = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const SymMatrix hess = disc_->hessian(i, x);
      const double v = with_policy ? op_.evaluate_with_policy(hess, policy[i]) : op_(hess);
      if (with_policy) Fu[i] = v;
      rmax = std::max(rmax, std::abs(f[i] - v));
    }
    return rmax;
  };

  InnerResult res;
  bool stale = !lu_;
  double rmax = evaluate(u, true);
  Eigen::VectorXd r(static_cast<Eigen::Index>(count));
  std::vector<double> trial(count);
  for (int k = 0;; ++k) {
    res.history.push_back(rmax);
    if (rmax <= tol_) {
      res.residual = rmax;
      res.iterations = k;
      res.u = std::move(u);
      return res;
    }
    if (k >= max_iter_) {
      throw NonConvergence("Newton inner solve: residual " + std::to_string(rmax) +
                               " above tolerance after " + std::to_string(k) + " steps",
                           res.history);
    }
    const bool fresh = stale;
    if (stale) {
      factorize(policy);
      stale = false;
    }
    for (std::size_t i = 0; i < count; ++i) r(static_cast<Eigen::Index>(i)) = f[i] - Fu[i];
    const Eigen::VectorXd delta = lu_->lu.solve(r);

    double step = 1.0;
    double trial_r = INFINITY;
    for (int halving = 0; halving < 12; ++halving) {
      for (std::size_t i = 0; i < count; ++i) {
        trial[i] = u[i] + step * delta(static_cast<Eigen::Index>(i));
      }
      trial_r = evaluate(trial, false);
      if (trial_r < rmax || !fresh) break;
      step *= 0.5;
    }
    if (!(trial_r < rmax) && !fresh) {
      // Reused factorization stopped contracting: rebuild at the current point.
      stale = true;
      --k;
      continue;
    }
    if (trial_r > 0.25 * rmax) stale = true;
    u.swap(trial);
    rmax = evaluate(u, true);
  }
}

InnerResult DirichletSolver::solve_pseudo_time(std::span<const double> f, std::vector<double> u) {
  const std::size_t count = u.size();
  const int n = disc_->grid().dimension();
  const double h = disc_->grid().spacing();
  const double Lambda = op_.Lambda();
  // tau = sigma h^2 / (2 n Lambda) on full stencils; shortened arms have a
  // larger diagonal and get the matching smaller local step.
  std::vector<double> tau(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double diag = disc_->laplacian_diagonal(i);
    tau[i] = std::min(h * h / (2.0 * n * Lambda), 1.0 / (Lambda * diag));
  }
  double sigma = cfg_.sigma;
  InnerResult res;
  std::vector<double> best = u;
  double best_r = INFINITY;
  for (int k = 0;; ++k) {
    const auto Fu = apply_operator(op_, *disc_, u);
    double rmax = 0.0;
    for (std::size_t i = 0; i < count; ++i) rmax = std::max(rmax, std::abs(Fu[i] - f[i]));
    res.history.push_back(rmax);
    if (rmax <= tol_) {
      res.residual = rmax;
      res.iterations = k;
      res.u = std::move(u);
      return res;
    }
    if (k >= max_iter_) {
      throw NonConvergence("pseudo-time inner solve: residual " + std::to_string(rmax) +
                               " above tolerance after " + std::to_string(k) + " steps",
                           res.history);
    }
    if (rmax > 1.5 * best_r) {
      // Growth: step too large for this configuration. Back off and retry.
      sigma *= 0.5;
      if (sigma < 1e-6) {
        throw NonConvergence("pseudo-time inner solve: step factor collapsed", res.history);
      }
      u = best;
      continue;
    }
    if (rmax < best_r) {
      best_r = rmax;
      best = u;
    }
    for (std::size_t i = 0; i < count; ++i) u[i] += sigma * tau[i] * (Fu[i] - f[i]);
  }
}

ScalarField solve_dirichlet(const EllipticOperator& op, const Discretization& disc,
                            const ScalarField& f, const InnerSolveConfig& cfg) {
  const Grid& grid = disc.grid();
  DirichletSolver solver(disc, op, cfg);
  const auto res = solver.solve(f.interior_values(grid));
  ScalarField out = ScalarField::from_interior(grid, res.u);
  apply_boundary(out, grid, disc.boundary());
  return out;
}

// Maximum principle

double domain_diameter(const DomainDescriptor& domain) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          double s = 0.0;
          for (const auto& iv : d.bounds) s += (iv.hi - iv.lo) * (iv.hi - iv.lo);
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, BallDomain>) {
          return 2.0 * d.radius;
        } else {
          return 2.0 * d.r_out;
        }
      },
      domain);
}

MaxPrincipleReport maximum_principle_check(const EllipticOperator& op,
                                           std::span<const double> u,
                                           std::span<const double> f,
                                           const Discretization& disc, double tolerance) {
  const Grid& grid = disc.grid();
  const int n = grid.dimension();
  MaxPrincipleReport rep;
  rep.sup_u = *std::max_element(u.begin(), u.end());
  rep.inf_u = *std::min_element(u.begin(), u.end());
  const auto [lo, hi] = boundary_range(grid, disc.boundary());
  rep.sup_boundary = hi;
  rep.inf_boundary = lo;

  bool nonneg = true;
  bool nonpos = true;
  double pos_n = 0.0;
  double neg_n = 0.0;
  for (double v : f) {
    rep.f_sup_norm = std::max(rep.f_sup_norm, std::abs(v));
    if (v < 0.0) nonneg = false;
    if (v > 0.0) nonpos = false;
    const double a = std::pow(std::abs(v), n) * grid.cell_measure();
    if (v > 0.0) pos_n += a;
    if (v < 0.0) neg_n += a;
  }
  rep.f_sign = nonneg ? 1 : (nonpos ? -1 : 0);

  const double omega = continuum_measure(BallDomain{n, {}, 1.0});
  rep.abp_constant =
      domain_diameter(grid.domain()) / (n * std::pow(omega, 1.0 / n) * op.lambda());
  rep.abp_upper = hi + rep.abp_constant * std::pow(neg_n, 1.0 / n);
  rep.abp_lower = lo - rep.abp_constant * std::pow(pos_n, 1.0 / n);

  if (nonneg) rep.upper_ok = rep.sup_u <= hi + tolerance;
  if (nonpos) rep.lower_ok = rep.inf_u >= lo - tolerance;
  rep.abp_ok = rep.sup_u <= rep.abp_upper + tolerance && rep.inf_u >= rep.abp_lower - tolerance;
  return rep;
}

}  // namespace nlfp
