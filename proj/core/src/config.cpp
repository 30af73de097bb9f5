#include "nlfp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace nlfp {

namespace {

const std::vector<std::string> kKeys = {
    "domain.type", "domain.dimension", "domain.lower", "domain.upper", "domain.center",
    "domain.radius", "domain.r_in", "domain.r_out",
    "grid.h",
    "operator.kind", "operator.lambda", "operator.Lambda",
    "profile.kind", "profile.a", "profile.b", "profile.knots", "profile.values",
    "boundary.kind", "boundary.coeffs", "boundary.center", "boundary.axis", "boundary.knots",
    "boundary.values",
    "solver.method", "solver.inner_method", "solver.inner_tolerance",
    "solver.inner_max_iterations", "solver.sigma", "solver.eps0", "solver.eps0_rel",
    "solver.rho", "solver.eps_min_rel", "solver.damping", "solver.anderson_depth",
    "solver.krylov_max_iterations", "solver.stage_tolerance", "solver.outer_tolerance",
    "solver.residual_tolerance", "solver.max_iterations", "solver.stage_max_iterations",
    "solver.tie_rule", "solver.tie_tolerance", "solver.seed",
    "output.field", "output.report",
    "study.h",
    "verify.max_error",
    "diagnose.field", "diagnose.delta", "diagnose.band", "diagnose.eps0", "diagnose.flat_constant",
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  std::vector<ConfigIssue> issues;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void fail(const std::string& key, std::string message) {
    issues.push_back({line(key), key, std::move(message)});
  }

  std::optional<std::string> text(const std::string& key, bool required = false) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      if (required) fail(key, "missing required key");
      return std::nullopt;
    }
    return it->second.value;
  }

  std::optional<double> number(const std::string& key, bool required = false) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    const auto v = parse_number(*t);
    if (!v) fail(key, "expected a finite number, got '" + *t + "'");
    return v;
  }

  template <class Int>
  std::optional<Int> integer(const std::string& key, bool required = false) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    Int v{};
    const auto* end = t->data() + t->size();
    const auto [p, ec] = std::from_chars(t->data(), end, v);
    if (ec != std::errc{} || p != end) {
      fail(key, "expected an integer, got '" + *t + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::vector<double>> list(const std::string& key, bool required = false) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    std::vector<double> out;
    std::string_view rest = *t;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      const auto v = parse_number(item);
      if (!v) {
        fail(key, "expected a comma separated list of numbers, got '" + *t + "'");
        return std::nullopt;
      }
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return out;
  }

  /// Checks `pred` on a present value; records `message` otherwise.
  template <class T, class Pred>
  void check(const std::string& key, const std::optional<T>& v, Pred pred, const char* message) {
    if (v && !pred(*v)) fail(key, message);
  }

 private:
  static std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  std::map<std::string, Entry> entries_;
};

Point to_point(const std::vector<double>& v) {
  Point p{};
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) p[i] = v[i];
  return p;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error([&] {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& i : issues) {
          os << "\n  ";
          if (i.line > 0) os << "line " << i.line << ": ";
          os << i.key << ": " << i.message;
        }
        return os.str();
      }()),
      issues_(std::move(issues)) {}

const std::vector<std::string>& config_keys() { return kKeys; }

bool RunConfig::is_ball_benchmark() const {
  return std::holds_alternative<BallDomain>(domain) &&
         profile.kind() == ProfileFunction::Kind::Linear && profile.slope() == -1.0 &&
         profile.intercept() == 0.0 &&
         std::holds_alternative<ZeroBoundary>(boundary.descriptor());
}

RunConfig parse_config(std::string_view text) { return parse_config(text, {}); }

RunConfig parse_config(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> entries;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({lineno, std::string(line), "expected 'section.key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      issues.push_back({lineno, key, "unknown key"});
      continue;
    }
    if (value.empty()) {
      issues.push_back({lineno, key, "empty value"});
      continue;
    }
    if (const auto it = entries.find(key); it != entries.end()) {
      issues.push_back({lineno, key,
                        "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
      continue;
    }
    entries.emplace(key, Entry{value, lineno});
  }

  for (const auto& [key, value] : overrides) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      issues.push_back({0, key, "unknown key (override)"});
    } else if (trim(value).empty()) {
      issues.push_back({0, key, "empty value (override)"});
    } else {
      entries[key] = Entry{std::string(trim(value)), 0};
    }
  }

  Reader r(std::move(entries));
  r.issues = std::move(issues);
  RunConfig cfg;
  auto positive = [](double v) { return v > 0.0; };

  // domain
  bool domain_ok = false;
  const auto type = r.text("domain.type", true);
  if (type) {
    if (*type == "box") {
      const auto lo = r.list("domain.lower", true);
      const auto hi = r.list("domain.upper", true);
      if (lo && hi) {
        if (lo->size() != hi->size() || lo->empty() || lo->size() > 3) {
          r.fail("domain.upper", "domain.lower and domain.upper need the same length, 1 to 3");
        } else {
          BoxDomain box;
          bool ok = true;
          for (std::size_t d = 0; d < lo->size(); ++d) {
            if (!((*hi)[d] > (*lo)[d])) ok = false;
            box.bounds.push_back({(*lo)[d], (*hi)[d]});
          }
          if (!ok) r.fail("domain.upper", "each upper bound must exceed its lower bound");
          else {
            cfg.domain = box;
            domain_ok = true;
          }
        }
      }
      if (const auto n = r.integer<int>("domain.dimension")) {
        if (lo && static_cast<std::size_t>(*n) != lo->size()) {
          r.fail("domain.dimension", "does not match the length of domain.lower");
          domain_ok = false;
        }
      }
    } else if (*type == "ball" || *type == "annulus") {
      // Without domain.dimension the center's length decides, then 2.
      auto center = r.list("domain.center");
      auto n = r.integer<int>("domain.dimension");
      r.check("domain.dimension", n, [](int v) { return v >= 1 && v <= 3; }, "must be 1, 2 or 3");
      if (!n && !r.has("domain.dimension")) {
        n = center && center->size() >= 1 && center->size() <= 3 ? static_cast<int>(center->size()) : 2;
      }
      if (center && n && static_cast<int>(center->size()) != *n) {
        r.fail("domain.center", "needs one coordinate per dimension");
        center.reset();
      }
      const Point c = center ? to_point(*center) : Point{};
      if (*type == "ball") {
        const auto radius = r.number("domain.radius", true);
        r.check("domain.radius", radius, positive, "must be positive");
        if (n && radius && *n >= 1 && *n <= 3 && *radius > 0.0) {
          cfg.domain = BallDomain{*n, c, *radius};
          domain_ok = true;
        }
      } else {
        const auto rin = r.number("domain.r_in", true);
        const auto rout = r.number("domain.r_out", true);
        r.check("domain.r_in", rin, positive, "must be positive");
        if (rin && rout && !(*rout > *rin)) r.fail("domain.r_out", "must exceed domain.r_in");
        if (n && rin && rout && *n >= 1 && *n <= 3 && *rin > 0.0 && *rout > *rin) {
          cfg.domain = AnnulusDomain{*n, c, *rin, *rout};
          domain_ok = true;
        }
      }
    } else {
      r.fail("domain.type", "must be box, ball or annulus");
    }
  }

  // grid
  const auto h = r.number("grid.h", true);
  r.check("grid.h", h, positive, "must be positive");
  double measure = 0.0;
  if (h && *h > 0.0 && domain_ok) {
    cfg.h = *h;
    try {
      const Grid grid = build_grid(cfg.domain, *h);
      measure = domain_measure(grid);
    } catch (const Error& e) {
      r.fail("grid.h", e.what());
    }
  }

  // operator
  if (const auto kind = r.text("operator.kind", true)) {
    if (*kind == "laplacian") {
      cfg.op = EllipticOperator::laplacian();
    } else if (*kind == "pucci_minus" || *kind == "pucci_plus") {
      const auto lo = r.number("operator.lambda", true);
      const auto hi = r.number("operator.Lambda", true);
      r.check("operator.lambda", lo, positive, "must be positive");
      if (lo && hi && *lo > *hi) r.fail("operator.Lambda", "must be >= operator.lambda");
      if (lo && hi && *lo > 0.0 && *hi >= *lo) {
        cfg.op = *kind == "pucci_minus" ? EllipticOperator::pucci_minus(*lo, *hi)
                                        : EllipticOperator::pucci_plus(*lo, *hi);
      }
    } else {
      r.fail("operator.kind", "must be laplacian, pucci_minus or pucci_plus");
    }
  }

  // profile
  if (const auto kind = r.text("profile.kind", true)) {
    if (*kind == "linear") {
      const auto a = r.number("profile.a", true);
      const auto b = r.number("profile.b", true);
      if (a && b) cfg.profile = ProfileFunction::linear(*a, *b);
    } else if (*kind == "table") {
      const auto knots = r.list("profile.knots", true);
      const auto values = r.list("profile.values", true);
      if (knots && values) {
        try {
          cfg.profile = ProfileFunction::table(*knots, *values);
          if (measure > 0.0) cfg.profile.check_domain(measure);
        } catch (const Error& e) {
          r.fail("profile.knots", e.what());
        }
      }
    } else {
      r.fail("profile.kind", "must be linear or table");
    }
  }

  // boundary
  if (const auto kind = r.text("boundary.kind", true)) {
    if (*kind == "zero") {
      cfg.boundary = BoundaryData(ZeroBoundary{});
    } else if (*kind == "radial_poly") {
      const auto coeffs = r.list("boundary.coeffs", true);
      Point c{};
      if (const auto center = r.list("boundary.center")) c = to_point(*center);
      else if (const auto* b = std::get_if<BallDomain>(&cfg.domain)) c = b->center;
      else if (const auto* a = std::get_if<AnnulusDomain>(&cfg.domain)) c = a->center;
      if (coeffs) cfg.boundary = BoundaryData(RadialPolynomialBoundary{c, *coeffs});
    } else if (*kind == "table") {
      const auto axis = r.integer<int>("boundary.axis", true);
      const auto knots = r.list("boundary.knots", true);
      const auto values = r.list("boundary.values", true);
      const int n = domain_ok ? domain_dimension(cfg.domain) : 3;
      r.check("boundary.axis", axis, [n](int a) { return a >= 0 && a < n; },
              "must name an axis of the domain");
      if (axis && knots && values) {
        try {
          cfg.boundary = BoundaryData(AxisTableBoundary{*axis, PiecewiseLinear(*knots, *values)});
        } catch (const Error& e) {
          r.fail("boundary.knots", e.what());
        }
      }
    } else {
      r.fail("boundary.kind", "must be zero, radial_poly or table");
    }
  }

  // solver
  OuterConfig& s = cfg.solver;
  if (const auto m = r.text("solver.method")) {
    if (*m == "newton") s.method = OuterMethod::Newton;
    else if (*m == "anderson") s.method = OuterMethod::Anderson;
    else if (*m == "picard") s.method = OuterMethod::Picard;
    else r.fail("solver.method", "must be newton, anderson or picard");
  }
  if (const auto m = r.text("solver.inner_method")) {
    if (*m == "auto") s.inner.method = InnerMethod::Auto;
    else if (*m == "linear") s.inner.method = InnerMethod::Linear;
    else if (*m == "newton") s.inner.method = InnerMethod::Newton;
    else if (*m == "pseudo_time") s.inner.method = InnerMethod::PseudoTime;
    else r.fail("solver.inner_method", "must be auto, linear, newton or pseudo_time");
    if (s.inner.method == InnerMethod::Linear && cfg.op.kind() != EllipticOperator::Kind::Laplacian) {
      r.fail("solver.inner_method", "linear applies to the Laplacian only");
    }
  }
  auto set_number = [&](const char* key, double& dst, auto pred, const char* message) {
    const auto v = r.number(key);
    r.check(key, v, pred, message);
    if (v && pred(*v)) dst = *v;
  };
  auto set_int = [&](const char* key, int& dst, int lo, const char* message) {
    const auto v = r.integer<int>(key);
    r.check(key, v, [lo](int x) { return x >= lo; }, message);
    if (v && *v >= lo) dst = *v;
  };
  set_number("solver.inner_tolerance", s.inner.tolerance, positive, "must be positive");
  set_int("solver.inner_max_iterations", s.inner.max_iterations, 1, "must be >= 1");
  set_number("solver.sigma", s.inner.sigma, [](double v) { return v > 0.0 && v <= 1.0; },
             "must lie in (0, 1]");
  set_number("solver.eps0", s.eps0, positive, "must be positive");
  set_number("solver.eps0_rel", s.eps0_rel, positive, "must be positive");
  set_number("solver.rho", s.rho, [](double v) { return v > 0.0 && v < 1.0; },
             "must lie in (0, 1)");
  set_number("solver.eps_min_rel", s.eps_min_rel, [](double v) { return v > 0.0 && v < 1.0; },
             "must lie in (0, 1)");
  set_number("solver.damping", s.damping, [](double v) { return v > 0.0 && v <= 1.0; },
             "must lie in (0, 1]");
  set_int("solver.anderson_depth", s.anderson_depth, 0, "must be >= 0");
  set_int("solver.krylov_max_iterations", s.krylov_max_iterations, 1, "must be >= 1");
  set_number("solver.stage_tolerance", s.stage_tolerance, positive, "must be positive");
  set_number("solver.outer_tolerance", s.outer_tolerance, positive, "must be positive");
  set_number("solver.residual_tolerance", s.residual_tolerance, positive, "must be positive");
  set_int("solver.max_iterations", s.max_iterations, 1, "must be >= 1");
  set_int("solver.stage_max_iterations", s.stage_max_iterations, 1, "must be >= 1");
  if (const auto t = r.text("solver.tie_rule")) {
    if (*t == "closed") s.tie_rule = TieRule::Closed;
    else if (*t == "half_ties") s.tie_rule = TieRule::HalfTies;
    else r.fail("solver.tie_rule", "must be closed or half_ties");
  }
  set_number("solver.tie_tolerance", s.tie_tolerance,
             [](double v) { return v >= 0.0 && v < 1e-3; }, "must lie in [0, 1e-3)");
  if (const auto seed = r.integer<std::uint64_t>("solver.seed")) cfg.seed = *seed;
  if (r.issues.empty()) {
    try {
      s.validate();
    } catch (const Error& e) {
      r.fail("solver", e.what());
    }
  }

  // output
  if (const auto f = r.text("output.field")) cfg.field_path = *f;
  if (const auto f = r.text("output.report")) cfg.report_path = *f;

  // study / verify / diagnose
  if (const auto hs = r.list("study.h")) {
    r.check("study.h", hs, [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    }, "every h must be positive");
    cfg.study_h = *hs;
  }
  set_number("verify.max_error", cfg.verify.max_error, positive, "must be positive");
  if (const auto f = r.text("diagnose.field")) cfg.diagnose.field = *f;
  set_number("diagnose.delta", cfg.diagnose.delta, positive, "must be positive");
  set_number("diagnose.band", cfg.diagnose.band, positive, "must be positive");
  set_number("diagnose.eps0", cfg.diagnose.eps0, positive, "must be positive");
  set_number("diagnose.flat_constant", cfg.diagnose.flat_constant, positive, "must be positive");

  if (!r.issues.empty()) {
    std::stable_sort(r.issues.begin(), r.issues.end(),
                     [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigError(std::move(r.issues));
  }
  return cfg;
}

}  // namespace nlfp
