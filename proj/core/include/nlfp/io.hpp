#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlfp/error.hpp"
#include "nlfp/field.hpp"
#include "nlfp/geometry.hpp"
#include "nlfp/outerloop.hpp"
#include "nlfp/verify.hpp"

namespace nlfp {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// A parsed field dump: header plus one (index, class, value) per node.
struct FieldDump {
  int dimension = 0;
  Index shape{1, 1, 1};
  double h = 0.0;
  Point origin{};
  std::vector<Index> index;
  std::vector<NodeClass> classes;
  std::vector<double> values;
};

/// Text form:
///   # n=2 shape=33,33 h=0.0625 origin=-1.0625,-1.0625
///   0,0 E 0
///   ...
/// One line per lattice node in storage order; classes are I, B, E.
std::string dump_field(const ScalarField& u, const Grid& grid);
std::string dump_field(const FieldDump& dump);

/// Throws IoError on malformed text.
FieldDump parse_field_dump(std::string_view text);

/// Rebuilds the field on `grid`. Throws InvalidParameter unless the dump's
/// header and node classes match the grid.
ScalarField field_from_dump(const FieldDump& dump, const Grid& grid);

/// Ordered `key = value` lines.
class KeyValueText {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value) { add(std::move(key), format_double(value)); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }

  /// Appends `other` with every key prefixed by `prefix.`.
  void append(const std::string& prefix, const KeyValueText& other);

  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

/// Every SolveReport field except wall-clock timings, which would break
/// byte-identical reports across runs.
KeyValueText report_text(const SolveReport& report);
KeyValueText study_text(const StudyResult& study);
KeyValueText barrier_text(const BarrierReport& report);

/// Writes through a temporary file in the same directory, then renames.
/// Throws IoError.
void write_file_atomic(const std::string& path, std::string_view content);
/// Throws IoError.
std::string read_file(const std::string& path);

}  // namespace nlfp
