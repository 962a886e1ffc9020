#pragma once

// Column-typed result tables and their deterministic serialization.  The
// same table always serializes to the same bytes: floats use 17
// significant digits, column order is fixed at construction, and the
// metadata sidecar carries no timestamps.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace nhchain {

using Cell = std::variant<double, std::int64_t, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void append_row(std::vector<Cell> row);  // must match the column count

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

enum class EmitFormat { Csv, Json };

// header line, then one line per row; doubles as %.17g, strings quoted
// only when they contain a delimiter
std::string to_csv(const Table& table);

// {"columns": {name: [values...]}, "row_count": n}
nlohmann::ordered_json to_json(const Table& table);

// inverse of to_json, used to verify round trips; the ordered type keeps
// column order intact
Table table_from_json(const nlohmann::ordered_json& doc);

// Writes the table to `path` in the chosen format plus a sidecar at
// path + ".meta.json" recording the run metadata, software version, and
// column names.  Throws IoError on filesystem failure.
void emit(const Table& table, const std::filesystem::path& path, EmitFormat format,
          const nlohmann::ordered_json& metadata);

std::string format_double(double value);  // exact 17-significant-digit form

}  // namespace nhchain
