#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlfp/elliptic.hpp"
#include "nlfp/error.hpp"
#include "nlfp/geometry.hpp"
#include "nlfp/measure.hpp"
#include "nlfp/outerloop.hpp"

namespace nlfp {

struct VerifyOptions {
  /// verify-ball fails its check when the max error exceeds this; <= 0 disables.
  double max_error = 0.0;
};

struct DiagnoseOptions {
  std::string field;          // field dump to examine
  double delta = 0.0;         // flat-region window; <= 0 selects h^2
  double band = 0.0;          // gradient band; <= 0 selects max(2h, 0.1 r)
  double eps0 = 0.0;          // barrier radius; <= 0 selects r / 2
  double flat_constant = 0.0; // tau constant; <= 0 calibrates on the ball solution
};

/// A fully validated run description.
struct RunConfig {
  DomainDescriptor domain;
  double h = 0.0;
  EllipticOperator op = EllipticOperator::laplacian();
  ProfileFunction profile = ProfileFunction::linear(-1.0, 0.0);
  BoundaryData boundary;
  OuterConfig solver;
  std::uint64_t seed = 0;

  std::string field_path;   // empty: no field dump
  std::string report_path;  // empty: report to stdout

  std::vector<double> study_h;
  VerifyOptions verify;
  DiagnoseOptions diagnose;

  /// The problem the closed-form ball solution describes: ball domain, g(t) = -t, psi = 0.
  bool is_ball_benchmark() const;
};

struct ConfigIssue {
  int line = 0;  // 0: not tied to a line (e.g. a missing key)
  std::string key;
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Parses `section.key = value` lines; `#` starts a comment. Lists are comma
/// separated. Collects every problem and throws ConfigError listing them.
RunConfig parse_config(std::string_view text);

/// As above, with `key = value` overrides replacing (or adding to) the text.
RunConfig parse_config(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

/// Every key parse_config accepts.
const std::vector<std::string>& config_keys();

}  // namespace nlfp
