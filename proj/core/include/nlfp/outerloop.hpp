#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlfp/elliptic.hpp"
#include "nlfp/field.hpp"
#include "nlfp/geometry.hpp"
#include "nlfp/measure.hpp"

namespace nlfp {

enum class InitialGuess { HomogeneousSolve };

/// How each eps stage drives ||T(v) - v|| to zero.
///   Newton:   semismooth Newton-Krylov on v - T(v), line search, damped
///             step as fallback
///   Anderson: Anderson mixing of the damped map
///   Picard:   the damped map v <- (1 - theta) v + theta T(v)
enum class OuterMethod { Newton, Anderson, Picard };

const char* to_string(OuterMethod m);

struct OuterConfig {
  // eps schedule. eps0 > 0 is absolute; otherwise eps0_rel * scale, where
  // scale is osc(v0), or osc(T(v0)) when v0 is constant.
  double eps0 = 0.0;
  double eps0_rel = 0.25;
  double rho = 0.5;
  double eps_min_rel = 1e-7;

  OuterMethod method = OuterMethod::Newton;
  double damping = 0.5;
  int anderson_depth = 5;
  /// Krylov iterations per Newton direction.
  int krylov_max_iterations = 80;
  /// Fixed-point residual ||T(v) - v||_inf at which an eps stage is settled.
  double stage_tolerance = 1e-7;
  /// Same, for the final stage (collapsed, or eps <= eps_min).
  double outer_tolerance = 1e-10;
  /// Plain residual required for Converged; <= 0 selects h.
  double residual_tolerance = 0.0;
  int max_iterations = 2000;
  /// A stage that has not settled after this many iterations ends the eps
  /// continuation: the solve returns T(v) of the last settled stage.
  int stage_max_iterations = 60;

  TieRule tie_rule = TieRule::HalfTies;
  /// Relative gap (to osc) below which iterate values count as tied.
  double tie_tolerance = 1e-10;

  InitialGuess initial_guess = InitialGuess::HomogeneousSolve;
  InnerSolveConfig inner;

  /// Throws InvalidParameter on an inconsistent configuration.
  void validate() const;
};

struct IterationRecord {
  int k = 0;
  int stage = 0;
  double eps = 0.0;
  double damping = 0.0;
  char step = 'P';  // N Newton, L line-search backtrack, A Anderson, P damped, S stage start
  int krylov_iterations = 0;
  double fixed_point_residual = 0.0;  // ||T(v_k) - v_k||_inf
  double increment = 0.0;   // ||v_{k+1} - v_k||_inf
  double lipschitz = 0.0;   // Lipschitz seminorm of the increment
  double inner_residual = 0.0;
  int inner_iterations = 0;
  double plain_residual = 0.0;  // of T(v_k)
  bool collapsed = false;       // eps below the smallest level gap
};

// Stalled: increments settled but the plain residual stayed above tolerance.
enum class SolveStatus { Converged, MaxIterations, InnerFailure, Diverged, Stalled };

const char* to_string(SolveStatus s);

struct ResidualSplit {
  double all = 0.0;
  double core = 0.0;  // full-stencil nodes at least 2h from the boundary
  double band = 0.0;  // the rest
};

struct SolveReport {
  SolveStatus status = SolveStatus::Converged;
  std::string message;
  InitialGuess initial_guess = InitialGuess::HomogeneousSolve;
  TieRule tie_rule = TieRule::HalfTies;
  OuterMethod method = OuterMethod::Newton;
  InnerMethod inner_method = InnerMethod::Auto;
  double inner_tolerance = 0.0;
  double scale = 0.0;
  double eps0 = 0.0;
  double eps_min = 0.0;
  double residual_tolerance = 0.0;
  int stages = 0;
  double final_eps = 0.0;
  /// The continuation ended at a settled eps above collapse and eps_min.
  bool continuation_stopped = false;
  std::vector<IterationRecord> records;
  ResidualSplit residual;
  double final_increment = 0.0;
  double final_fixed_point_residual = 0.0;
  double sup_norm = 0.0;
  double bound = 0.0;  // ABP-type a priori bound on ||v_k||_inf
  /// Wall clock seconds per eps stage. Not part of the deterministic output.
  std::vector<double> stage_seconds;

  bool converged() const { return status == SolveStatus::Converged; }
};

struct NonlocalSolution {
  ScalarField u;
  SolveReport report;
};

/// One damped step v <- (1 - theta) v + theta T(v), T(v) the Dirichlet solve
/// with the eps-smoothed right-hand side. Interior values only.
struct StepResult {
  std::vector<double> v;        // damped iterate
  std::vector<double> t;        // T(v)
  InnerResult inner;
  bool collapsed = false;
};

StepResult fixed_point_step(std::span<const double> v, double eps, double theta,
                            const Discretization& disc, const ProfileFunction& g,
                            DirichletSolver& solver, TieRule rule = TieRule::HalfTies,
                            double tie_tolerance = 1e-10);

ScalarField fixed_point_step(const ScalarField& v, double eps, double theta,
                             const EllipticOperator& op, const Discretization& disc,
                             const ProfileFunction& g, const OuterConfig& cfg = {});

NonlocalSolution solve_nonlocal(const EllipticOperator& op, const Discretization& disc,
                                const ProfileFunction& g, const OuterConfig& cfg = {});

/// max |F(D^2u) - g(mu(u))| over Interior nodes, with levels canonicalized
/// at tie_tolerance first (0 disables).
ResidualSplit plain_residual(std::span<const double> u, const EllipticOperator& op,
                             const Discretization& disc, const ProfileFunction& g,
                             TieRule rule = TieRule::Closed, double tie_tolerance = 0.0);
ResidualSplit plain_residual(const ScalarField& u, const EllipticOperator& op,
                             const Discretization& disc, const ProfileFunction& g,
                             TieRule rule = TieRule::Closed, double tie_tolerance = 0.0);

/// max |psi| + C |Omega|^(1/n) sup|g| with C = diam / (n omega_n^(1/n) lambda).
double abp_bound(const EllipticOperator& op, const Discretization& disc,
                 const ProfileFunction& g);

/// Interior nodes on the residual band: within 2h of the boundary or with a
/// shortened stencil.
std::vector<std::uint8_t> band_mask(const Discretization& disc);

}  // namespace nlfp
