#pragma once

// Row-oriented result tables with CSV and JSON writers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "melic/error.hpp"

namespace melic {

using Cell = std::variant<std::string, std::int64_t, double, bool, std::monostate>;

struct Field {
  std::string name;
  Cell value;
};

using Row = std::vector<Field>;

enum class TableFormat { Csv, Json };

namespace detail {

/// Shortest decimal with at most 6 significant digits.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return csv_escape(s); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(std::monostate) const { return ""; }
  };
  return std::visit(Visitor{}, cell);
}

inline nlohmann::ordered_json cell_json(const Cell& cell) {
  struct Visitor {
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return format_real(v);
      return std::strtod(format_real(v).c_str(), nullptr);
    }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace detail

/// Serialises rows that share one schema. CSV gets a header row and `\n`
/// line endings; JSON is an array of objects with keys in schema order.
/// `columns` names the schema when `rows` may be empty.
inline std::string write_table(const std::vector<Row>& rows, TableFormat format,
                               const std::vector<std::string>& columns = {}) {
  std::vector<std::string> schema = columns;
  if (schema.empty() && !rows.empty()) {
    for (const Field& f : rows.front()) schema.push_back(f.name);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool same = rows[r].size() == schema.size();
    for (std::size_t c = 0; same && c < schema.size(); ++c) same = rows[r][c].name == schema[c];
    if (!same) throw SchemaError("row " + std::to_string(r) + " does not match the table schema");
  }

  if (format == TableFormat::Json) {
    auto array = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (const Field& f : row) obj[f.name] = detail::cell_json(f.value);
      array.push_back(std::move(obj));
    }
    return array.dump(1) + "\n";
  }

  std::string out;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(schema[c]);
  }
  out += '\n';
  for (const Row& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += detail::cell_text(row[c].value);
    }
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header; throws SchemaError when absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw SchemaError("missing CSV column \"" + std::string(name) + "\"");
  }
};

/// Minimal RFC 4180 reader: first record is the header, quoted fields may
/// contain commas, doubled quotes and newlines. Blank lines are skipped.
inline CsvTable read_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (field_started || !record.empty()) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
      field_started = true;
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
  }
  end_record();
  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw SchemaError("CSV record " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                        " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

}  // namespace melic
