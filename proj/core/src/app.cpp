#include "nlfp/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nlfp/io.hpp"
#include "nlfp/verify.hpp"

namespace nlfp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* operator_name(const EllipticOperator& op) {
  switch (op.kind()) {
    case EllipticOperator::Kind::Laplacian: return "laplacian";
    case EllipticOperator::Kind::PucciMinus: return "pucci_minus";
    case EllipticOperator::Kind::PucciPlus: return "pucci_plus";
  }
  return "?";
}

// Problem description shared by every report.
KeyValueText problem_text(const std::string& command, const RunConfig& cfg, const Grid& grid) {
  KeyValueText t;
  t.add("command", command);
  t.add("problem.dimension", grid.dimension());
  t.add("problem.operator", operator_name(cfg.op));
  t.add("problem.lambda", cfg.op.lambda());
  t.add("problem.Lambda", cfg.op.Lambda());
  t.add("grid.h", grid.spacing());
  t.add("grid.interior_nodes", grid.interior_count());
  t.add("grid.measure", domain_measure(grid));
  return t;
}

void emit_report(const RunConfig& cfg, const KeyValueText& report, std::ostream& out) {
  if (cfg.report_path.empty()) {
    out << report.str();
  } else {
    write_file_atomic(cfg.report_path, report.str());
  }
}

// The radius used for default bands and barrier balls.
double reference_radius(const DomainDescriptor& d) {
  if (const auto* b = std::get_if<BallDomain>(&d)) return b->radius;
  if (const auto* a = std::get_if<AnnulusDomain>(&d)) return a->r_out - a->r_in;
  const auto& box = std::get<BoxDomain>(d);
  double m = INFINITY;
  for (const auto& iv : box.bounds) m = std::min(m, 0.5 * (iv.hi - iv.lo));
  return m;
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const Grid grid = build_grid(cfg.domain, cfg.h);
  const Discretization disc(grid, cfg.boundary);
  const NonlocalSolution sol = solve_nonlocal(cfg.op, disc, cfg.profile, cfg.solver);
  KeyValueText report = problem_text("solve", cfg, grid);
  report.append("solve", report_text(sol.report));
  if (!cfg.field_path.empty()) write_file_atomic(cfg.field_path, dump_field(sol.u, grid));
  emit_report(cfg, report, out);
  err << "solve: " << to_string(sol.report.status) << " after " << sol.report.records.size()
      << " outer iterations, " << std::setprecision(3) << seconds_since(t0) << " s\n";
  if (!sol.report.converged()) {
    err << "solve: " << sol.report.message << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_ball(const std::string& command, const RunConfig& cfg, std::ostream& out,
             std::ostream& err) {
  if (!cfg.is_ball_benchmark()) {
    err << command << ": needs a ball domain with profile g(t) = -t and zero boundary data\n";
    return kExitUsage;
  }
  std::vector<double> hs = cfg.study_h;
  if (command == "study" && hs.size() < 2) {
    err << "study: study.h must list at least two spacings\n";
    return kExitUsage;
  }
  if (hs.empty()) hs.push_back(cfg.h);

  const auto t0 = Clock::now();
  StudyProblem problem{std::get<BallDomain>(cfg.domain), cfg.op, cfg.solver};
  const StudyResult study = convergence_order_study(problem, hs);

  const Grid grid = build_grid(cfg.domain, hs.back());
  KeyValueText report = problem_text(command, cfg, grid);
  const BallSolution exact = exact_ball_solution(problem.ball, cfg.op);
  report.add("exact.center_value", exact(problem.ball.center));
  report.append("table", study_text(study));
  for (std::size_t k = 0; k < study.rows.size(); ++k) {
    report.append("level." + std::to_string(k) + ".solve", report_text(study.rows[k].report));
  }

  out << std::left << std::setw(12) << "h" << std::setw(10) << "nodes" << std::setw(14)
      << "error_linf" << std::setw(10) << "order" << "status\n";
  for (std::size_t k = 0; k < study.rows.size(); ++k) {
    const StudyRow& r = study.rows[k];
    out << std::setw(12) << format_double(r.h) << std::setw(10) << r.nodes << std::setw(14)
        << std::setprecision(4) << std::scientific << r.error << std::defaultfloat << std::setw(10)
        << (k == 0 ? std::string("-") : fixed2(r.order))
        << to_string(r.status) << "\n";
  }
  out << std::right;
  for (const StudyRow& r : study.rows) {
    err << command << ": h=" << format_double(r.h) << " " << std::setprecision(3) << r.seconds
        << " s\n";
  }
  err << command << ": total " << std::setprecision(3) << seconds_since(t0) << " s\n";

  if (!cfg.field_path.empty()) {
    write_file_atomic(cfg.field_path,
                      dump_field(ScalarField::from_interior(grid, study.rows.back().u), grid));
  }
  bool check_ok = true;
  if (command == "verify-ball" && cfg.verify.max_error > 0.0) {
    check_ok = study.rows.back().error <= cfg.verify.max_error;
    report.add("check.max_error", cfg.verify.max_error);
    report.add("check.passed", check_ok);
  }
  emit_report(cfg, report, out);
  if (!study.all_converged()) return kExitNotConverged;
  return check_ok ? kExitOk : kExitCheckFailed;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.diagnose.field.empty()) {
    err << "diagnose: set diagnose.field to a field dump\n";
    return kExitUsage;
  }
  const FieldDump dump = parse_field_dump(read_file(cfg.diagnose.field));
  const Grid grid = build_grid(cfg.domain, cfg.h);
  const Discretization disc(grid, cfg.boundary);
  const ScalarField field = field_from_dump(dump, grid);
  const std::vector<double> u = field.interior_values(grid);
  const double h = grid.spacing();
  const double total = domain_measure(grid);

  KeyValueText report = problem_text("diagnose", cfg, grid);
  bool ok = true;

  const ResidualSplit res = plain_residual(u, cfg.op, disc, cfg.profile, cfg.solver.tie_rule,
                                           cfg.solver.tie_tolerance);
  report.add("residual.all", res.all);
  report.add("residual.core", res.core);
  report.add("residual.band", res.band);

  // Flat regions: excluded when g < 0 on (0, |Omega|].
  const double delta = cfg.diagnose.delta > 0.0 ? cfg.diagnose.delta : h * h;
  const auto levels = flat_region_detector(u, grid.cell_measure(), delta, 8);
  report.add("flat.delta", delta);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const std::string p = "flat.level." + std::to_string(k) + ".";
    report.add(p + "value", levels[k].level);
    report.add(p + "measure", levels[k].measure);
  }
  const double max_mass = levels.empty() ? 0.0 : levels.front().measure;
  std::optional<FlatThreshold> tau;
  if (cfg.diagnose.flat_constant > 0.0) {
    tau = FlatThreshold{cfg.diagnose.flat_constant};
  } else if (const auto* ball = std::get_if<BallDomain>(&cfg.domain)) {
    const double hs[] = {h};
    const double ds[] = {delta};
    tau = calibrate_flat_threshold(*ball, cfg.op, hs, ds);
  }
  const bool flat_enabled = tau.has_value() && cfg.profile.negative_on(total);
  report.add("flat.checked", flat_enabled);
  report.add("flat.max_measure", max_mass);
  if (flat_enabled) {
    const double threshold = (*tau)(h, delta);
    const bool pass = max_mass <= threshold;
    report.add("flat.constant", tau->constant);
    report.add("flat.threshold", threshold);
    report.add("flat.passed", pass);
    ok = ok && pass;
  }

  const double band = cfg.diagnose.band > 0.0
                          ? cfg.diagnose.band
                          : std::max(2.0 * h, 0.1 * reference_radius(cfg.domain));
  report.add("gradient.band", band);
  report.add("gradient.min", boundary_gradient_min(u, disc, band));

  // The barrier argument is for g(t) = -t with zero data on a ball or annulus.
  const bool barrier_enabled = !std::holds_alternative<BoxDomain>(cfg.domain) &&
                               cfg.profile.kind() == ProfileFunction::Kind::Linear &&
                               cfg.profile.slope() == -1.0 && cfg.profile.intercept() == 0.0 &&
                               std::holds_alternative<ZeroBoundary>(cfg.boundary.descriptor());
  report.add("barrier.checked", barrier_enabled);
  if (barrier_enabled) {
    const double eps0 =
        cfg.diagnose.eps0 > 0.0 ? cfg.diagnose.eps0 : 0.5 * reference_radius(cfg.domain);
    BarrierOptions opts;
    opts.band = band;
    const BarrierReport b = barrier_comparison_check(u, disc, cfg.op, eps0, opts);
    report.append("barrier", barrier_text(b));
    report.add("barrier.passed", b.passed());
    ok = ok && b.passed();
  }

  // Increasing rearrangement at tenths of |Omega|.
  const StepFunction ustar = increasing_rearrangement(u, grid.cell_measure());
  for (int k = 0; k <= 10; ++k) {
    report.add("rearrangement.t" + std::to_string(k), ustar(total * k / 10.0));
  }

  report.add("passed", ok);
  emit_report(cfg, report, out);
  err << "diagnose: " << (ok ? "all checks passed" : "check failed") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"solve", "verify-ball", "study", "diagnose"};
  return names;
}

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (subcommand == "solve") return cmd_solve(cfg, out, err);
    if (subcommand == "verify-ball" || subcommand == "study") return cmd_ball(subcommand, cfg, out, err);
    if (subcommand == "diagnose") return cmd_diagnose(cfg, out, err);
    err << "unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << subcommand << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const NonConvergence& e) {
    err << subcommand << ": " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const Error& e) {
    err << subcommand << ": " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace nlfp
