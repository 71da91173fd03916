#pragma once

// Columnar mixed-type dataset: continuous columns hold doubles (NaN where
// missing), discrete columns hold integer category codes into a per-column
// level dictionary (-1 where missing). CSV ingestion takes a schema declaring
// every column's kind; missing cells are empty fields or a sentinel string.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bnkit/common.hpp"
#include "bnkit/graph.hpp"

namespace bnkit {

struct ColumnSpec {
  NodeKind kind = NodeKind::Continuous;
  bool percent_scale = false;  // values are percentages in [0, 100]
};

// name -> declared kind; every CSV column must be declared.
using Schema = std::map<std::string, ColumnSpec>;

struct Column {
  std::string name;
  NodeKind kind = NodeKind::Continuous;
  bool percent_scale = false;
  std::vector<double> values;            // continuous payload (NaN = missing)
  std::vector<int> codes;                // discrete payload (-1 = missing)
  std::vector<std::string> levels;       // discrete level dictionary
  std::vector<char> missing;             // mask, one per row

  bool is_missing(std::size_t row) const { return missing[row] != 0; }
};

class MixedTable {
 public:
  int add_column(const std::string& name, NodeKind kind, bool percent_scale = false) {
    if (index_.count(name)) throw data_error("duplicate column name: " + name);
    index_[name] = static_cast<int>(columns_.size());
    Column c;
    c.name = name;
    c.kind = kind;
    c.percent_scale = percent_scale;
    c.values.resize(n_rows_, std::numeric_limits<double>::quiet_NaN());
    c.codes.resize(n_rows_, -1);
    c.missing.resize(n_rows_, 1);
    columns_.push_back(std::move(c));
    return static_cast<int>(columns_.size()) - 1;
  }

  int n_cols() const { return static_cast<int>(columns_.size()); }
  std::size_t n_rows() const { return n_rows_; }

  const Column& column(int j) const {
    check_col(j);
    return columns_[static_cast<std::size_t>(j)];
  }
  Column& column(int j) {
    check_col(j);
    return columns_[static_cast<std::size_t>(j)];
  }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw data_error("unknown column name: " + name);
    return it->second;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Appends one row of all-missing cells; callers then set cell values.
  std::size_t add_row() {
    for (auto& c : columns_) {
      c.values.push_back(std::numeric_limits<double>::quiet_NaN());
      c.codes.push_back(-1);
      c.missing.push_back(1);
    }
    return n_rows_++;
  }

  void set_continuous(int j, std::size_t row, double v) {
    Column& c = column(j);
    if (c.kind != NodeKind::Continuous)
      throw data_error("column " + c.name + " is not continuous");
    check_row(row);
    if (std::isnan(v)) throw data_error("NaN assigned to cell in column " + c.name);
    c.values[row] = v;
    c.missing[row] = 0;
  }

  void set_discrete(int j, std::size_t row, int code) {
    Column& c = column(j);
    if (c.kind != NodeKind::Discrete)
      throw data_error("column " + c.name + " is not discrete");
    check_row(row);
    if (code < 0 || code >= static_cast<int>(c.levels.size()))
      throw data_error("code out of range for column " + c.name);
    c.codes[row] = code;
    c.missing[row] = 0;
  }

  void set_missing(int j, std::size_t row) {
    Column& c = column(j);
    check_row(row);
    c.values[row] = std::numeric_limits<double>::quiet_NaN();
    c.codes[row] = -1;
    c.missing[row] = 1;
  }

  // Returns the code for a level label, adding it to the dictionary if new.
  int level_code(int j, const std::string& label) {
    Column& c = column(j);
    if (c.kind != NodeKind::Discrete)
      throw data_error("column " + c.name + " is not discrete");
    auto it = std::find(c.levels.begin(), c.levels.end(), label);
    if (it != c.levels.end()) return static_cast<int>(it - c.levels.begin());
    c.levels.push_back(label);
    return static_cast<int>(c.levels.size()) - 1;
  }

  bool is_missing(int j, std::size_t row) const {
    const Column& c = column(j);
    check_row(row);
    return c.missing[row] != 0;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (const auto& c : columns_)
      for (char m : c.missing) n += static_cast<std::size_t>(m);
    return n;
  }

  bool complete() const { return missing_count() == 0; }

  // New table holding the given rows (duplicates allowed); level dictionaries
  // are carried over unchanged so codes stay comparable across subsets.
  MixedTable select_rows(const std::vector<std::size_t>& rows) const {
    MixedTable out;
    out.n_rows_ = rows.size();
    out.index_ = index_;
    out.columns_.reserve(columns_.size());
    for (const auto& c : columns_) {
      Column nc;
      nc.name = c.name;
      nc.kind = c.kind;
      nc.percent_scale = c.percent_scale;
      nc.levels = c.levels;
      nc.values.reserve(rows.size());
      nc.codes.reserve(rows.size());
      nc.missing.reserve(rows.size());
      for (std::size_t r : rows) {
        if (r >= n_rows_) throw data_error("row index out of range in select_rows");
        nc.values.push_back(c.values[r]);
        nc.codes.push_back(c.codes[r]);
        nc.missing.push_back(c.missing[r]);
      }
      out.columns_.push_back(std::move(nc));
    }
    return out;
  }

  // Node list matching the column order, for building graphs over this table.
  std::vector<Node> schema_nodes() const {
    std::vector<Node> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(Node{c.name, c.kind});
    return out;
  }

 private:
  void check_col(int j) const {
    if (j < 0 || j >= n_cols())
      throw data_error("column index out of range: " + std::to_string(j));
  }
  void check_row(std::size_t row) const {
    if (row >= n_rows_) throw data_error("row index out of range: " + std::to_string(row));
  }

  std::vector<Column> columns_;
  std::map<std::string, int> index_;
  std::size_t n_rows_ = 0;
};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

// Minimal RFC-4180 field splitting: quoted fields may contain commas and
// doubled quotes. No embedded newlines.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch == '\r' && i + 1 == line.size()) {
      // tolerate CRLF input
    } else {
      cur += ch;
    }
  }
  if (quoted)
    throw data_error("line " + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(cur);
  return fields;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw data_error(where + ": cannot parse number '" + t + "'");
  return v;
}

// Shortest round-trip decimal rendering, for byte-stable artifacts.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

struct CsvOptions {
  std::string na_sentinel = "NA";  // empty fields are always missing too
};

// Reads a header-row CSV against a schema declaring every column. Lines
// beginning with '#' are comments (artifacts written by this toolkit embed
// their configuration that way). Discrete level codes are assigned by sorted
// level label, independent of row order.
inline MixedTable read_csv(std::istream& in, const Schema& schema, const CsvOptions& opt = {}) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line[0] == '#') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string header;
  if (!next_line(header)) throw data_error("empty CSV input");
  const std::vector<std::string> names = detail::split_csv_line(header, line_no);

  MixedTable t;
  for (const auto& raw : names) {
    const std::string name = detail::trim(raw);
    if (name.empty()) throw data_error("empty column name in CSV header");
    auto it = schema.find(name);
    if (it == schema.end())
      throw data_error("column '" + name + "' not declared in schema");
    t.add_column(name, it->second.kind, it->second.percent_scale);
  }
  for (const auto& [name, spec] : schema) {
    (void)spec;
    if (!t.find(name))
      throw data_error("schema declares column '" + name + "' absent from CSV");
  }

  // First pass: collect rows as strings so discrete levels can be coded in
  // sorted order before any cell is written.
  std::vector<std::vector<std::string>> rows;
  std::string body;
  while (next_line(body)) {
    if (detail::trim(body).empty()) continue;
    auto fields = detail::split_csv_line(body, line_no);
    if (fields.size() != names.size())
      throw data_error("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(names.size()) + " fields, got " +
                       std::to_string(fields.size()));
    rows.push_back(std::move(fields));
  }

  for (int j = 0; j < t.n_cols(); ++j) {
    if (t.column(j).kind != NodeKind::Discrete) continue;
    std::set<std::string> seen;
    for (const auto& r : rows) {
      const std::string v = detail::trim(r[static_cast<std::size_t>(j)]);
      if (!v.empty() && v != opt.na_sentinel) seen.insert(v);
    }
    for (const auto& label : seen) t.level_code(j, label);
  }

  for (const auto& r : rows) {
    const std::size_t row = t.add_row();
    for (int j = 0; j < t.n_cols(); ++j) {
      const std::string v = detail::trim(r[static_cast<std::size_t>(j)]);
      if (v.empty() || v == opt.na_sentinel) continue;  // stays missing
      if (t.column(j).kind == NodeKind::Continuous)
        t.set_continuous(j, row, detail::parse_double(v, "column " + t.column(j).name));
      else
        t.set_discrete(j, row, t.level_code(j, v));
    }
  }
  return t;
}

inline MixedTable read_csv_file(const std::string& path, const Schema& schema,
                                const CsvOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open CSV file: " + path);
  try {
    return read_csv(in, schema, opt);
  } catch (const data_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

// Writes header + rows; optional '# ' comment lines first. Continuous cells
// use shortest round-trip formatting; missing cells use the sentinel.
inline void write_csv(std::ostream& out, const MixedTable& t,
                      const std::vector<std::string>& comments = {},
                      const CsvOptions& opt = {}) {
  for (const auto& c : comments) out << "# " << c << "\n";
  for (int j = 0; j < t.n_cols(); ++j) {
    if (j) out << ",";
    out << detail::csv_escape(t.column(j).name);
  }
  out << "\n";
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    for (int j = 0; j < t.n_cols(); ++j) {
      if (j) out << ",";
      const Column& c = t.column(j);
      if (c.is_missing(r))
        out << opt.na_sentinel;
      else if (c.kind == NodeKind::Continuous)
        out << detail::format_double(c.values[r]);
      else
        out << detail::csv_escape(c.levels[static_cast<std::size_t>(c.codes[r])]);
    }
    out << "\n";
  }
}

inline void write_csv_file(const std::string& path, const MixedTable& t,
                           const std::vector<std::string>& comments = {},
                           const CsvOptions& opt = {}) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write CSV file: " + path);
  write_csv(out, t, comments, opt);
}

}  // namespace bnkit
