#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlfp/app.hpp"
#include "nlfp/config.hpp"
#include "nlfp/io.hpp"

using namespace nlfp;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(# unit disk
domain.type = ball
domain.radius = 1
grid.h = 0.03125
operator.kind = laplacian
profile.kind = linear
profile.a = -1
profile.b = 0
boundary.kind = zero
)";

const char* kCoarse = R"(domain.type = ball
domain.radius = 1
grid.h = 0.125
operator.kind = laplacian
profile.kind = linear
profile.a = -1
profile.b = 0
boundary.kind = zero
)";

std::vector<ConfigIssue> issues_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool names_key(const std::vector<ConfigIssue>& issues, const std::string& key) {
  for (const auto& i : issues) {
    if (i.key == key) return true;
  }
  return false;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nlfp_test_" + std::to_string(std::hash<std::string>{}(std::to_string(
                               reinterpret_cast<std::uintptr_t>(this)))));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal ball config") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.is_ball_benchmark());
    CHECK(c.h == 0.03125);
    CHECK(std::get<BallDomain>(c.domain).radius == 1.0);
    CHECK(c.op.kind() == EllipticOperator::Kind::Laplacian);
  }

  TEST_CASE("Pucci needs Lambda") {
    std::string t = kMinimal;
    t.replace(t.find("laplacian"), 9, "pucci_minus\noperator.lambda = 1");
    CHECK(names_key(issues_of(t), "operator.Lambda"));
    CHECK(names_key(issues_of(t + "operator.Lambda = 0.5\n"), "operator.Lambda"));
    CHECK(issues_of(t + "operator.Lambda = 2\n").empty());
  }

  TEST_CASE("table profile knots must increase") {
    std::string t = kMinimal;
    t.replace(t.find("profile.kind = linear"), 21, "profile.kind = table");
    const auto issues = issues_of(t + "profile.knots = 0, 2, 1, 4\nprofile.values = 0, -1, -2, -3\n");
    CHECK(names_key(issues, "profile.knots"));
  }

  TEST_CASE("unknown keys and bad values carry line numbers") {
    const auto issues = issues_of(std::string(kMinimal) + "solver.bogus = 3\nsolver.rho = 1.5\n");
    REQUIRE(issues.size() == 2);
    CHECK(issues[0].key == "solver.bogus");
    CHECK(issues[0].line == 10);
    CHECK(issues[1].key == "solver.rho");
    CHECK(issues[1].line == 11);
    CHECK(names_key(issues_of("domain.type = ball\n"), "grid.h"));
  }

  TEST_CASE("overrides replace keys") {
    const RunConfig c = parse_config(kMinimal, {{"grid.h", "0.0625"}, {"study.h", "0.25, 0.125"}});
    CHECK(c.h == 0.0625);
    CHECK(c.study_h == std::vector<double>{0.25, 0.125});
    CHECK_THROWS_AS(parse_config(kMinimal, {{"nope", "1"}}), ConfigError);
  }
}

TEST_SUITE("io") {
  TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 0.0, 12345.678}) {
      CHECK(std::stod(format_double(v)) == v);
    }
  }

  TEST_CASE("field dump round trip is byte identical") {
    const Grid g = build_annulus({0.1, 0, 0}, 0.3, 1.0, 0.0625, 2);
    const ScalarField u = sample(g, [](const Point& x) { return std::sin(7 * x[0]) / 3.0 + x[1]; });
    const std::string text = dump_field(u, g);
    const FieldDump d = parse_field_dump(text);
    CHECK(dump_field(d) == text);
    const ScalarField back = field_from_dump(d, g);
    for (std::size_t k = 0; k < u.size(); ++k) REQUIRE(back[k] == u[k]);
    CHECK(dump_field(back, g) == text);

    const Grid other = build_annulus({0.1, 0, 0}, 0.3, 1.0, 0.03125, 2);
    CHECK_THROWS(field_from_dump(d, other));
  }

  TEST_CASE("malformed dumps") {
    CHECK_THROWS_AS(parse_field_dump(""), IoError);
    CHECK_THROWS_AS(parse_field_dump("# n=1 shape=2 h=0.5 origin=0\n0 I 1\n"), IoError);
    CHECK_THROWS_AS(parse_field_dump("# n=1 shape=2 h=0.5 origin=0\n0 Q 1\n1 I 2\n"), IoError);
  }

  TEST_CASE("atomic write") {
    TempDir dir;
    const std::string p = dir.file("a.txt");
    write_file_atomic(p, "one\n");
    write_file_atomic(p, "two\n");
    CHECK(read_file(p) == "two\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(read_file(dir.file("missing")), IoError);
    CHECK_THROWS_AS(write_file_atomic(dir.file("no/such/dir.txt"), "x"), IoError);
  }
}

TEST_SUITE("app") {
  TEST_CASE("solve writes a field and exits 0") {
    TempDir dir;
    RunConfig c = parse_config(kCoarse);
    c.field_path = dir.file("u.txt");
    std::ostringstream out, err;
    CHECK(run("solve", c, out, err) == kExitOk);
    CHECK(out.str().find("solve.status = Converged") != std::string::npos);
    CHECK_NOTHROW(field_from_dump(parse_field_dump(read_file(c.field_path)), build_grid(c.domain, c.h)));
  }

  TEST_CASE("non-convergence exits 2") {
    RunConfig c = parse_config(kCoarse, {{"solver.max_iterations", "1"}});
    std::ostringstream out, err;
    CHECK(run("solve", c, out, err) == kExitNotConverged);
  }

  TEST_CASE("verify-ball exit codes") {
    std::ostringstream out, err;
    RunConfig c = parse_config(kCoarse, {{"verify.max_error", "1e-12"}});
    CHECK(run("verify-ball", c, out, err) == kExitCheckFailed);
    c = parse_config(kCoarse, {{"verify.max_error", "0.1"}});
    CHECK(run("verify-ball", c, out, err) == kExitOk);
    c = parse_config(kCoarse, {{"profile.b", "-1"}});
    CHECK(run("verify-ball", c, out, err) == kExitUsage);
    CHECK(run("study", parse_config(kCoarse), out, err) == kExitUsage);
    CHECK(run("frobnicate", parse_config(kCoarse), out, err) == kExitUsage);
  }

  TEST_CASE("diagnose exit codes") {
    TempDir dir;
    RunConfig c = parse_config(kCoarse);
    std::ostringstream out, err;
    CHECK(run("diagnose", c, out, err) == kExitUsage);
    c.diagnose.field = dir.file("missing.txt");
    CHECK(run("diagnose", c, out, err) == kExitIo);

    // a constant field fails the gradient check
    const Grid g = build_grid(c.domain, c.h);
    write_file_atomic(dir.file("flat.txt"), dump_field(ScalarField(g, 0.0), g));
    c.diagnose.field = dir.file("flat.txt");
    CHECK(run("diagnose", c, out, err) == kExitCheckFailed);

    // a dump from another grid is rejected
    const Grid fine = build_grid(c.domain, c.h / 2);
    write_file_atomic(dir.file("fine.txt"), dump_field(ScalarField(fine, 0.0), fine));
    c.diagnose.field = dir.file("fine.txt");
    CHECK(run("diagnose", c, out, err) == kExitUsage);
  }

  TEST_CASE("reports are deterministic") {
    const RunConfig c = parse_config(kCoarse, {{"study.h", "0.25, 0.125"}});
    std::ostringstream a, b, err;
    REQUIRE(run("verify-ball", c, a, err) == kExitOk);
    REQUIRE(run("verify-ball", c, b, err) == kExitOk);
    CHECK(a.str() == b.str());
  }
}
