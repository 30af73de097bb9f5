#include "nlfp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace nlfp {

namespace {

char class_letter(NodeClass c) {
  switch (c) {
    case NodeClass::Interior: return 'I';
    case NodeClass::Boundary: return 'B';
    case NodeClass::Exterior: return 'E';
  }
  return '?';
}

std::string join(const double* v, int n) {
  std::string s;
  for (int d = 0; d < n; ++d) {
    if (d) s += ',';
    s += format_double(v[d]);
  }
  return s;
}

std::string join(const int* v, int n) {
  std::string s;
  for (int d = 0; d < n; ++d) {
    if (d) s += ',';
    s += std::to_string(v[d]);
  }
  return s;
}

std::string_view next_token(std::string_view& s) {
  const auto b = s.find_first_not_of(' ');
  if (b == std::string_view::npos) {
    s = {};
    return {};
  }
  s.remove_prefix(b);
  const auto e = s.find(' ');
  const auto tok = s.substr(0, e);
  s = e == std::string_view::npos ? std::string_view{} : s.substr(e);
  return tok;
}

[[noreturn]] void bad(int line, const std::string& what) {
  throw IoError("field dump line " + std::to_string(line) + ": " + what);
}

double to_double(std::string_view s, int line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) bad(line, "bad number '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s, int line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) bad(line, "bad integer '" + std::string(s) + "'");
  return v;
}

template <class T, class F>
std::vector<T> split_list(std::string_view s, F parse) {
  std::vector<T> out;
  while (true) {
    const auto c = s.find(',');
    out.push_back(parse(s.substr(0, c)));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string dump_field(const ScalarField& u, const Grid& grid) {
  u.check_grid(grid);
  FieldDump d;
  d.dimension = grid.dimension();
  d.shape = grid.shape();
  d.h = grid.spacing();
  d.origin = grid.origin();
  d.index.reserve(grid.node_count());
  for (std::size_t k = 0; k < grid.node_count(); ++k) {
    d.index.push_back(grid.index_of(k));
    d.classes.push_back(grid.node_class(k));
    d.values.push_back(u[k]);
  }
  return dump_field(d);
}

std::string dump_field(const FieldDump& d) {
  const int n = d.dimension;
  std::string out = "# n=" + std::to_string(n) + " shape=" + join(d.shape.data(), n) +
                    " h=" + format_double(d.h) + " origin=" + join(d.origin.data(), n) + "\n";
  out.reserve(out.size() + d.values.size() * 24);
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    out += join(d.index[k].data(), n);
    out += ' ';
    out += class_letter(d.classes[k]);
    out += ' ';
    out += format_double(d.values[k]);
    out += '\n';
  }
  return out;
}

FieldDump parse_field_dump(std::string_view text) {
  FieldDump d;
  int line = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view row = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
    if (row.empty()) continue;
    if (!header) {
      if (!row.starts_with("# ")) bad(line, "missing header");
      row.remove_prefix(2);
      bool seen[4] = {false, false, false, false};
      std::string_view origin_text, shape_text;
      while (!row.empty()) {
        const auto tok = next_token(row);
        if (tok.empty()) break;
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) bad(line, "bad header field");
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "n") {
          d.dimension = to_int(val, line);
          seen[0] = true;
        } else if (key == "shape") {
          shape_text = val;
          seen[1] = true;
        } else if (key == "h") {
          d.h = to_double(val, line);
          seen[2] = true;
        } else if (key == "origin") {
          origin_text = val;
          seen[3] = true;
        } else {
          bad(line, "unknown header field '" + std::string(key) + "'");
        }
      }
      if (!(seen[0] && seen[1] && seen[2] && seen[3])) bad(line, "incomplete header");
      if (d.dimension < 1 || d.dimension > 3) bad(line, "dimension must be 1, 2 or 3");
      const auto shape = split_list<int>(shape_text, [&](std::string_view s) { return to_int(s, line); });
      const auto origin =
          split_list<double>(origin_text, [&](std::string_view s) { return to_double(s, line); });
      if (static_cast<int>(shape.size()) != d.dimension ||
          static_cast<int>(origin.size()) != d.dimension) {
        bad(line, "shape and origin need one entry per dimension");
      }
      for (int k = 0; k < d.dimension; ++k) {
        d.shape[k] = shape[k];
        d.origin[k] = origin[k];
      }
      header = true;
      continue;
    }
    const auto idx_tok = next_token(row);
    const auto cls_tok = next_token(row);
    const auto val_tok = next_token(row);
    if (val_tok.empty() || !row.empty() || cls_tok.size() != 1) bad(line, "expected '<index> <class> <value>'");
    const auto idx = split_list<int>(idx_tok, [&](std::string_view s) { return to_int(s, line); });
    if (static_cast<int>(idx.size()) != d.dimension) bad(line, "index needs one entry per dimension");
    Index ix{0, 0, 0};
    for (int k = 0; k < d.dimension; ++k) ix[k] = idx[k];
    NodeClass c;
    switch (cls_tok[0]) {
      case 'I': c = NodeClass::Interior; break;
      case 'B': c = NodeClass::Boundary; break;
      case 'E': c = NodeClass::Exterior; break;
      default: bad(line, "node class must be I, B or E");
    }
    d.index.push_back(ix);
    d.classes.push_back(c);
    d.values.push_back(to_double(val_tok, line));
  }
  if (!header) throw IoError("field dump is empty");
  std::size_t expected = 1;
  for (int k = 0; k < d.dimension; ++k) expected *= static_cast<std::size_t>(d.shape[k]);
  if (d.values.size() != expected) {
    throw IoError("field dump has " + std::to_string(d.values.size()) + " node lines, shape needs " +
                  std::to_string(expected));
  }
  return d;
}

ScalarField field_from_dump(const FieldDump& d, const Grid& grid) {
  auto mismatch = [](const std::string& what) {
    throw InvalidParameter("field dump does not match the configured grid: " + what);
  };
  if (d.dimension != grid.dimension()) mismatch("dimension");
  for (int k = 0; k < d.dimension; ++k) {
    if (d.shape[k] != grid.shape()[k]) mismatch("shape");
    if (d.origin[k] != grid.origin()[k]) mismatch("origin");
  }
  if (d.h != grid.spacing()) mismatch("spacing");
  if (d.values.size() != grid.node_count()) mismatch("node count");
  ScalarField u(grid);
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    if (d.index[k] != grid.index_of(k)) mismatch("node order");
    if (d.classes[k] != grid.node_class(k)) mismatch("node classes");
    u[k] = d.values[k];
  }
  return u;
}

void KeyValueText::add(std::string key, std::string value) {
  lines_.emplace_back(std::move(key), std::move(value));
}

void KeyValueText::append(const std::string& prefix, const KeyValueText& other) {
  for (const auto& [k, v] : other.lines_) lines_.emplace_back(prefix + "." + k, v);
}

std::string KeyValueText::str() const {
  std::string out;
  for (const auto& [k, v] : lines_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

KeyValueText report_text(const SolveReport& r) {
  static const char* const kInner[] = {"auto", "linear", "newton", "pseudo_time"};
  KeyValueText t;
  t.add("status", to_string(r.status));
  t.add("message", r.message.empty() ? std::string("-") : r.message);
  t.add("initial_guess", "homogeneous_solve");
  t.add("method", to_string(r.method));
  t.add("tie_rule", r.tie_rule == TieRule::Closed ? "closed" : "half_ties");
  t.add("inner.method", kInner[static_cast<int>(r.inner_method)]);
  t.add("inner.tolerance", r.inner_tolerance);
  t.add("eps.scale", r.scale);
  t.add("eps.initial", r.eps0);
  t.add("eps.min", r.eps_min);
  t.add("eps.final", r.final_eps);
  t.add("eps.stages", r.stages);
  t.add("eps.continuation_stopped", r.continuation_stopped);
  t.add("final.fixed_point_residual", r.final_fixed_point_residual);
  t.add("final.increment", r.final_increment);
  t.add("final.residual", r.residual.all);
  t.add("final.residual_core", r.residual.core);
  t.add("final.residual_band", r.residual.band);
  t.add("final.residual_tolerance", r.residual_tolerance);
  t.add("final.sup_norm", r.sup_norm);
  t.add("final.bound", r.bound);
  t.add("iterations", r.records.size());
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const IterationRecord& q = r.records[k];
    const std::string p = "record." + std::to_string(k) + ".";
    t.add(p + "stage", q.stage);
    t.add(p + "eps", q.eps);
    t.add(p + "step", std::string(1, q.step));
    t.add(p + "damping", q.damping);
    t.add(p + "krylov_iterations", q.krylov_iterations);
    t.add(p + "fixed_point_residual", q.fixed_point_residual);
    t.add(p + "increment", q.increment);
    t.add(p + "lipschitz", q.lipschitz);
    t.add(p + "inner_residual", q.inner_residual);
    t.add(p + "inner_iterations", q.inner_iterations);
    t.add(p + "plain_residual", q.plain_residual);
    t.add(p + "collapsed", q.collapsed);
  }
  return t;
}

KeyValueText study_text(const StudyResult& s) {
  KeyValueText t;
  t.add("levels", s.rows.size());
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    const StudyRow& r = s.rows[k];
    const std::string p = "level." + std::to_string(k) + ".";
    t.add(p + "h", r.h);
    t.add(p + "nodes", r.nodes);
    t.add(p + "error_linf", r.error);
    t.add(p + "order", k == 0 ? std::string("-") : format_double(r.order));
    t.add(p + "status", to_string(r.status));
    t.add(p + "iterations", r.iterations);
    t.add(p + "residual", r.residual);
  }
  return t;
}

KeyValueText barrier_text(const BarrierReport& b) {
  KeyValueText t;
  t.add("eps0", b.eps0);
  t.add("c0", b.c0);
  t.add("Lambda", b.Lambda);
  t.add("tolerance", b.tolerance);
  t.add("band", b.band);
  t.add("gradient_min", b.gradient_min);
  t.add("gradient_factor", b.gradient_factor);
  t.add("gradient_passed", b.gradient_passed);
  t.add("comparison_passed", b.comparison_passed);
  t.add("measure_hypothesis", b.measure_hypothesis);
  t.add("points", b.points.size());
  for (std::size_t k = 0; k < b.points.size(); ++k) {
    const BarrierPoint& p = b.points[k];
    const std::string q = "point." + std::to_string(k) + ".";
    t.add(q + "boundary_point", join(p.boundary_point.data(), 3));
    t.add(q + "inner_sphere", p.inner_sphere);
    t.add(q + "nodes", p.nodes);
    t.add(q + "min_margin", p.min_margin);
    t.add(q + "passed", p.passed);
    t.add(q + "measure_hypothesis", p.measure_hypothesis);
  }
  return t;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename " + tmp.string() + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path + " failed");
  return ss.str();
}

}  // namespace nlfp
