#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nlfp/field.hpp"
#include "nlfp/geometry.hpp"

namespace nlfp {

/// Symmetric n x n matrix, n <= 3, stored dense row-major.
struct SymMatrix {
  int n = 0;
  std::array<double, 9> a{};

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * 3 + j)]; }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * 3 + j)]; }
  double trace() const;
};

/// Eigenvalues in ascending order (first n entries used).
std::array<double, 3> eigenvalues(const SymMatrix& m);

/// F(D^2u): the Laplacian or one of the Pucci extremal operators. F(0) = 0
/// for every variant.
class EllipticOperator {
 public:
  enum class Kind { Laplacian, PucciMinus, PucciPlus };

  static EllipticOperator laplacian();
  static EllipticOperator pucci_minus(double lambda, double Lambda);
  static EllipticOperator pucci_plus(double lambda, double Lambda);

  Kind kind() const noexcept { return kind_; }
  /// Ellipticity constants; both are 1 for the Laplacian.
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }

  double operator()(const SymMatrix& m) const;

  /// Evaluates F(m) and returns the coefficient matrix A with F(m) = tr(A m)
  /// and F(m') <= tr(A m') (PucciMinus) or >= (PucciPlus) for every m'.
  /// This is the policy the Newton solve linearizes with.
  double evaluate_with_policy(const SymMatrix& m, SymMatrix& policy) const;

 private:
  EllipticOperator(Kind k, double lo, double hi) : kind_(k), lambda_(lo), Lambda_(hi) {}
  Kind kind_;
  double lambda_;
  double Lambda_;
};

/// Finite-difference stencils for every Hessian entry at every Interior node
/// of a grid, with the Dirichlet data folded into constant terms.
///
/// Pure second differences use Shortley-Weller weights on arms that end on
/// the boundary; mixed differences average the 2x2 quadrant formulas whose
/// lattice nodes all carry values. With all four quadrants present this is
/// the central 4-point cross difference.
///
/// Holds a reference to the grid, which must outlive it.
class Discretization {
 public:
  struct Term {
    std::int32_t col;
    double weight;
  };

  Discretization(const Grid& grid, BoundaryData psi);

  const Grid& grid() const noexcept { return *grid_; }
  const BoundaryData& boundary() const noexcept { return psi_; }

  /// Linear part of entry (d, e) at interior node i. d <= e.
  std::span<const Term> terms(std::size_t i, int d, int e) const;
  /// Contribution of the Dirichlet data to entry (d, e) at node i.
  double constant(std::size_t i, int d, int e) const;

  SymMatrix hessian(std::size_t i, std::span<const double> u) const;

  /// Central differences on every axis and every mixed pair.
  bool full_stencil(std::size_t i) const { return full_[i] != 0; }

  /// -sum_d weight of u_i in entry (d, d): the diagonal of the discrete Laplacian,
  /// up to sign.
  double laplacian_diagonal(std::size_t i) const;

  /// First derivative along `axis` at node i: three-point formula on the
  /// (possibly shortened) arms.
  double derivative(std::size_t i, int axis, std::span<const double> u) const;

 private:
  static constexpr int kEntries = 6;
  static int entry_index(int d, int e);

  const Grid* grid_;
  BoundaryData psi_;
  std::vector<std::size_t> offsets_;  // (interior * kEntries + entry) -> terms_ range
  std::vector<Term> terms_;
  std::vector<double> constants_;
  std::vector<std::uint8_t> full_;
};

SymMatrix discrete_hessian(const ScalarField& u, const Discretization& disc, std::size_t node);

/// F(D^2u) on Interior nodes.
std::vector<double> apply_operator(const EllipticOperator& op, const Discretization& disc,
                                   std::span<const double> u);
ScalarField apply_operator(const EllipticOperator& op, const ScalarField& u,
                           const Discretization& disc);

enum class InnerMethod {
  Auto,        // Linear for the Laplacian, Newton for Pucci operators
  Linear,      // sparse LU of the Laplacian plus residual correction
  Newton,      // policy (Howard) iteration, factorization reused while it contracts
  PseudoTime,  // explicit u <- u + tau (F(D^2u) - f)
};

struct InnerSolveConfig {
  InnerMethod method = InnerMethod::Auto;
  /// Max-norm residual target; <= 0 selects the method default.
  double tolerance = 0.0;
  /// <= 0 selects the method default.
  int max_iterations = 0;
  /// Pseudo-time step factor in (0, 1]: tau = sigma h^2 / (2 n Lambda).
  double sigma = 1.0;

  static constexpr double kLinearTolerance = 1e-8;
  static constexpr double kNewtonTolerance = 1e-10;
  static constexpr double kPseudoTimeTolerance = 1e-6;
};

InnerMethod resolve_method(const EllipticOperator& op, InnerMethod requested);
double resolve_tolerance(const InnerSolveConfig& cfg, InnerMethod method);

struct InnerResult {
  std::vector<double> u;  // interior values
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

/// Solves F(D^2u) = f, u = psi for a fixed right-hand side. Keeps the last
/// factorization, so repeated solves on one grid reuse it. Not thread-safe;
/// use one instance per thread.
class DirichletSolver {
 public:
  DirichletSolver(const Discretization& disc, EllipticOperator op, InnerSolveConfig cfg = {});
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  const EllipticOperator& op() const noexcept { return op_; }
  InnerMethod method() const noexcept { return method_; }
  double tolerance() const noexcept { return tol_; }

  /// `initial` may be empty (start from zero). Throws NonConvergence.
  InnerResult solve(std::span<const double> f, std::span<const double> initial = {});

  /// Solves the linearized problem L d = rhs, d = 0 on the boundary, with the
  /// factorization of the most recent solve (the Laplacian, or the Newton
  /// policy it ended with). Throws PreconditionError before the first solve
  /// of a Pucci operator.
  std::vector<double> solve_linearized(std::span<const double> rhs);

 private:
  struct Factorization;

  InnerResult solve_linear(std::span<const double> f, std::vector<double> u);
  InnerResult solve_newton(std::span<const double> f, std::vector<double> u);
  InnerResult solve_pseudo_time(std::span<const double> f, std::vector<double> u);
  void factorize(const std::vector<SymMatrix>& policy);

  const Discretization* disc_;
  EllipticOperator op_;
  InnerSolveConfig cfg_;
  InnerMethod method_;
  double tol_;
  int max_iter_;
  std::unique_ptr<Factorization> lu_;
  std::vector<double> last_u_;
};

ScalarField solve_dirichlet(const EllipticOperator& op, const Discretization& disc,
                            const ScalarField& f, const InnerSolveConfig& cfg = {});

struct MaxPrincipleReport {
  double sup_u = 0.0;
  double inf_u = 0.0;
  double sup_boundary = 0.0;
  double inf_boundary = 0.0;
  double f_sup_norm = 0.0;
  int f_sign = 0;  // +1: f >= 0, -1: f <= 0, 0: mixed; f == 0 reports +1
  double abp_constant = 0.0;
  double abp_upper = 0.0;  // sup_boundary + C ||f^-||_{L^n}
  double abp_lower = 0.0;  // inf_boundary - C ||f^+||_{L^n}
  bool upper_ok = true;    // f >= 0  =>  sup u <= sup psi + tol
  bool lower_ok = true;    // f <= 0  =>  inf u >= inf psi - tol
  bool abp_ok = true;
  bool passed() const { return upper_ok && lower_ok && abp_ok; }
};

MaxPrincipleReport maximum_principle_check(const EllipticOperator& op,
                                           std::span<const double> u,
                                           std::span<const double> f,
                                           const Discretization& disc, double tolerance);

/// Diameter of the continuum domain.
double domain_diameter(const DomainDescriptor& domain);

}  // namespace nlfp
