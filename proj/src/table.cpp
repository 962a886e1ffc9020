#include "nhchain/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "nhchain/errors.hpp"
#include "nhchain/version.hpp"

namespace nhchain {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("table needs at least one column");
}

void Table::append_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) +
                                " cells, table has " + std::to_string(columns_.size()) +
                                " columns");
  rows_.push_back(std::move(row));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string cell_to_csv(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(cell));
}

nlohmann::ordered_json cell_to_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;  // NaN dumps as null
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  return std::get<std::string>(cell);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  const auto& cols = table.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(cols[c]);
  }
  out += '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += cell_to_csv(row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json to_json(const Table& table) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns().size(); ++c) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows()) arr.push_back(cell_to_json(row[c]));
    cols[table.columns()[c]] = std::move(arr);
  }
  nlohmann::ordered_json doc;
  doc["columns"] = std::move(cols);
  doc["row_count"] = table.row_count();
  return doc;
}

Table table_from_json(const nlohmann::ordered_json& doc) {
  const auto& cols = doc.at("columns");
  std::vector<std::string> names;
  for (auto it = cols.begin(); it != cols.end(); ++it) names.push_back(it.key());
  Table table(names);
  const std::size_t n = doc.at("row_count").get<std::size_t>();
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Cell> row;
    for (const auto& name : names) {
      const auto& v = cols.at(name).at(r);
      if (v.is_null()) {
        row.emplace_back(std::numeric_limits<double>::quiet_NaN());
      } else if (v.is_number_float()) {
        row.emplace_back(v.get<double>());
      } else if (v.is_number_integer()) {
        row.emplace_back(v.get<std::int64_t>());
      } else {
        row.emplace_back(v.get<std::string>());
      }
    }
    table.append_row(std::move(row));
  }
  return table;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace

void emit(const Table& table, const std::filesystem::path& path, EmitFormat format,
          const nlohmann::ordered_json& metadata) {
  std::string payload;
  if (format == EmitFormat::Csv) {
    payload = to_csv(table);
  } else {
    payload = to_json(table).dump(2);
    payload += '\n';
  }
  write_file(path, payload);

  nlohmann::ordered_json side;
  side["software"] = {{"name", "nhchain"}, {"version", kVersionString}};
  side["columns"] = table.columns();
  side["row_count"] = table.row_count();
  side["run"] = metadata;
  std::filesystem::path meta = path;
  meta += ".meta.json";
  write_file(meta, side.dump(2) + "\n");
}

}  // namespace nhchain
