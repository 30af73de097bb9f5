#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlfp/elliptic.hpp"
#include "nlfp/field.hpp"
#include "nlfp/geometry.hpp"
#include "nlfp/measure.hpp"
#include "nlfp/outerloop.hpp"

namespace nlfp {

/// omega_n, the volume of the unit n-ball. Throws InvalidParameter for n
/// outside 1..3.
double unit_ball_volume(int n);

/// Closed-form solution of F(D^2u) = -|{u >= u(x)}|, u = 0 on the sphere:
///   u(x) = s * omega_n / (2n(n+2)) * (r^(n+2) - |x - c|^(n+2))
/// with s = 1 (Laplacian), 1/Lambda (PucciMinus), 1/lambda (PucciPlus). Its
/// Hessian is negative semidefinite, so each Pucci operator reduces to a
/// multiple of the Laplacian on it.
class BallSolution {
 public:
  BallSolution(const Point& center, double radius, int dimension, double scale);

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dimension() const noexcept { return n_; }
  double scale() const noexcept { return scale_; }

  double operator()(const Point& x) const;
  /// d/ds of the radial profile at distance s from the center (<= 0).
  double radial_derivative(double s) const;
  Point gradient(const Point& x) const;

  /// Interior-node samples on `grid`.
  std::vector<double> sample_interior(const Grid& grid) const;

 private:
  Point center_;
  double radius_;
  int n_;
  double scale_;
  double k_;  // scale * omega_n / (2n(n+2))
};

BallSolution exact_ball_solution(const Point& center, double radius, int dimension,
                                 const EllipticOperator& op);
BallSolution exact_ball_solution(const BallDomain& ball, const EllipticOperator& op);

/// c0 = omega_n eps0^(n+1) / (2 n Lambda)
double barrier_gradient_constant(double eps0, int dimension, double Lambda);

// Barrier comparison

struct BarrierPoint {
  Point boundary_point{};
  Point ball_center{};     // center of the inner tangent ball
  bool inner_sphere = false;  // annulus: tangent to the inner sphere
  std::size_t nodes = 0;   // Interior nodes inside the tangent ball
  double min_margin = 0.0;  // min (u - barrier) over those nodes
  bool passed = true;
  /// Every node in the tangent ball has |{u >= u(x)}| >= |Omega| / 2.
  bool measure_hypothesis = true;
};

struct BarrierOptions {
  double tolerance = 1e-6;
  /// Width of the boundary band for the gradient bound; <= 0 selects
  /// max(2h, 0.1 * radius).
  double band = 0.0;
  /// The band gradient must reach this fraction of c0.
  double gradient_factor = 0.9;
};

struct BarrierReport {
  double eps0 = 0.0;
  double c0 = 0.0;
  double Lambda = 1.0;
  double tolerance = 0.0;
  double band = 0.0;
  double gradient_min = 0.0;
  double gradient_factor = 0.9;
  std::vector<BarrierPoint> points;
  bool comparison_passed = true;
  bool gradient_passed = true;
  bool measure_hypothesis = true;

  bool passed() const { return comparison_passed && gradient_passed; }
};

/// Places inner tangent balls of radius eps0 at 2 / 8 / 26 equispaced boundary
/// directions (n = 1 / 2 / 3), evaluates the barrier
///   w(x) = omega_n / (2n(n+2) Lambda) * (eps0^(n+2) - |x - y|^(n+2))
/// on each, and checks u >= w - tolerance at every Interior node inside.
/// Also measures the boundary-band gradient against c0.
///
/// `u` holds Interior values. Throws PreconditionError on a box grid, when
/// omega_n eps0^n > |Omega| / 2, or when an annulus is too thin for the ball.
BarrierReport barrier_comparison_check(std::span<const double> u, const Discretization& disc,
                                       const EllipticOperator& op, double eps0,
                                       const BarrierOptions& opts = {});

/// min |grad u| over Interior nodes within `band` of the boundary, with
/// three-point differences on the Shortley-Weller arms. Throws
/// InvalidParameter for band < 2h.
double boundary_gradient_min(std::span<const double> u, const Discretization& disc, double band);

// Flat regions

struct FlatLevel {
  double level = 0.0;
  std::size_t count = 0;
  double measure = 0.0;  // h^n * #{|u - level| <= delta}
};

/// Candidate levels are the node values. Each reports the mass within delta;
/// levels are picked greedily by mass with windows [a - delta, a + delta]
/// pairwise disjoint. Sorted by measure, largest first; at most max_levels.
std::vector<FlatLevel> flat_region_detector(std::span<const double> values, double cell,
                                            double delta, std::size_t max_levels = 16);

/// tau(h, delta) = constant * (delta + h)
struct FlatThreshold {
  double constant = 0.0;
  double operator()(double h, double delta) const { return constant * (delta + h); }
};

/// Fits the threshold constant on the sampled exact ball solution: the largest
/// max-mass / (delta + h) over the given (h, delta) pairs, times `safety`.
FlatThreshold calibrate_flat_threshold(const BallDomain& ball, const EllipticOperator& op,
                                       std::span<const double> hs,
                                       std::span<const double> deltas, double safety = 1.25);

// Convergence study

struct StudyProblem {
  BallDomain ball;
  EllipticOperator op = EllipticOperator::laplacian();
  OuterConfig solver;
};

struct StudyRow {
  double h = 0.0;
  std::size_t nodes = 0;
  double error = 0.0;          // max |u - u_exact| over Interior nodes
  double order = 0.0;          // log2(e(previous) / e(this)); NaN for the first row
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;        // not deterministic
  SolveReport report;
  std::vector<double> u;       // Interior values of the solution
};

struct StudyResult {
  std::vector<StudyRow> rows;
  bool all_converged() const;
};

/// Solves g(t) = -t, psi = 0 on the ball at each h (concurrently) and
/// compares with the closed form. Orders are between consecutive rows, so
/// hs should halve.
StudyResult convergence_order_study(const StudyProblem& problem, std::span<const double> hs);

}  // namespace nlfp
