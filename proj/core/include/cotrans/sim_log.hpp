#pragma once

// Column-oriented run logs. One table per entity (payload, each UAV),
// a fixed header per scenario kind, and a flat run summary.
//
// Logged positions and vectors use [x, y, height]: the NED z component is
// negated at write time so height is positive up.

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cotrans {

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  // Appends one row; throws Error on a width mismatch or a time column
  // that does not strictly increase.
  void add_row(std::vector<double> row);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }

  // Throws Error for unknown column names.
  int index(const std::string& column) const;
  bool has(const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
  double at(std::size_t row, const std::string& column) const { return rows_[row][index(column)]; }

  // Bitwise comparison: NaN entries compare equal to identical NaNs.
  bool operator==(const Table& other) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct Summary {
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> notes;

  void set(const std::string& key, double value);
  void note(const std::string& key, const std::string& text);
  std::optional<double> get(const std::string& key) const;
  std::optional<std::string> get_note(const std::string& key) const;

  // Bitwise on values, like Table.
  bool operator==(const Summary& other) const;
};

struct RunLog {
  std::string scenario;
  std::vector<std::pair<std::string, Table>> tables;
  Summary summary;

  Table& add_table(const std::string& name, std::vector<std::string> columns);
  const Table& table(const std::string& name) const;
  Table& table(const std::string& name);
  bool has_table(const std::string& name) const;

  // False when the run stopped on an integration or controller failure.
  bool ok() const { return !summary.get_note("failure").has_value(); }

  bool operator==(const RunLog& other) const = default;
};

// CSV with a header row; numbers printed with 17 significant digits so a
// round trip through read_csv is exact.
std::string to_csv(const Table& t);
void write_csv(const Table& t, const std::string& path);
Table read_csv(const std::string& path);
Table parse_csv(const std::string& text);

std::string table_to_json(const Table& t);
std::string summary_to_json(const Summary& s, const std::string& scenario);

// Writes <dir>/<table>.csv and/or <dir>/<table>.json for every table and
// <dir>/summary.json. Creates the directory. Returns the written paths.
std::vector<std::string> write_run(const RunLog& log, const std::string& dir, bool csv, bool json);

}  // namespace cotrans
