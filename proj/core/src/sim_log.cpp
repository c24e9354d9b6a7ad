#include "cotrans/sim_log.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cotrans/errors.hpp"
#include "json.hpp"

namespace cotrans {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw Error("Table::add_row: expected " + std::to_string(columns_.size()) + " values, got " +
                std::to_string(row.size()));
  }
  if (!rows_.empty() && !columns_.empty() && columns_.front() == "t" && !(row.front() > rows_.back().front())) {
    throw Error("Table::add_row: time must strictly increase");
  }
  rows_.push_back(std::move(row));
}

int Table::index(const std::string& column) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == column) return static_cast<int>(i);
  }
  throw Error("Table: no column named '" + column + "'");
}

bool Table::has(const std::string& column) const {
  for (const auto& c : columns_) {
    if (c == column) return true;
  }
  return false;
}

std::vector<double> Table::column(const std::string& name) const {
  const int c = index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool Table::operator==(const Table& other) const {
  if (columns_ != other.columns_ || rows_.size() != other.rows_.size()) return false;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (!same_bits(rows_[r], other.rows_[r])) return false;
  }
  return true;
}

bool Summary::operator==(const Summary& other) const {
  if (notes != other.notes || values.size() != other.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].first != other.values[i].first || !same_bits(values[i].second, other.values[i].second)) return false;
  }
  return true;
}

void Summary::set(const std::string& key, double value) {
  for (auto& [k, v] : values) {
    if (k == key) {
      v = value;
      return;
    }
  }
  values.emplace_back(key, value);
}

void Summary::note(const std::string& key, const std::string& text) {
  for (auto& [k, v] : notes) {
    if (k == key) {
      v = text;
      return;
    }
  }
  notes.emplace_back(key, text);
}

std::optional<double> Summary::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<std::string> Summary::get_note(const std::string& key) const {
  for (const auto& [k, v] : notes) {
    if (k == key) return v;
  }
  return std::nullopt;
}

Table& RunLog::add_table(const std::string& name, std::vector<std::string> columns) {
  if (has_table(name)) throw Error("RunLog: duplicate table '" + name + "'");
  tables.emplace_back(name, Table(std::move(columns)));
  return tables.back().second;
}

const Table& RunLog::table(const std::string& name) const {
  for (const auto& [n, t] : tables) {
    if (n == name) return t;
  }
  throw Error("RunLog: no table named '" + name + "'");
}

Table& RunLog::table(const std::string& name) {
  for (auto& [n, t] : tables) {
    if (n == name) return t;
  }
  throw Error("RunLog: no table named '" + name + "'");
}

bool RunLog::has_table(const std::string& name) const {
  for (const auto& [n, t] : tables) {
    if (n == name) return true;
  }
  return false;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error("CSV line " + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns().size(); ++c) {
    if (c) out += ',';
    out += t.columns()[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto& row = t.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      append_number(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_csv(t);
}

Table parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw Error("CSV: missing header row");
  Table t(split(line));
  std::size_t line_no = 1;
  // Rows are validated for width; time ordering is checked by add_row.
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    t.add_row(std::move(row));
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string table_to_json(const Table& t) {
  nlohmann::json j;
  j["columns"] = t.columns();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : t.row(r)) row.push_back(number_json(v));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump();
}

std::string summary_to_json(const Summary& s, const std::string& scenario) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  for (const auto& [k, v] : s.values) j["metrics"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
  for (const auto& [k, v] : s.notes) j["notes"][k] = v;
  return j.dump(2);
}

std::vector<std::string> write_run(const RunLog& log, const std::string& dir, bool csv, bool json) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  for (const auto& [name, table] : log.tables) {
    if (csv) {
      const auto path = (fs::path(dir) / (name + ".csv")).string();
      write_csv(table, path);
      written.push_back(path);
    }
    if (json) {
      const auto path = (fs::path(dir) / (name + ".json")).string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error("cannot write '" + path + "'");
      out << table_to_json(table);
      written.push_back(path);
    }
  }
  const auto path = (fs::path(dir) / "summary.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << summary_to_json(log.summary, log.scenario) << '\n';
  written.push_back(path);
  return written;
}

}  // namespace cotrans
