#include "qtheta/report.hpp"

#include <fstream>

#include "json.hpp"
#include "qtheta/format.hpp"

namespace qtheta {

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw domain_error("Table: at least one column required");
}

void Table::set_meta(std::string key, std::string value) {
  for (auto& kv : meta_) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  meta_.emplace_back(std::move(key), std::move(value));
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw domain_error("Table: row width does not match column count");
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += csv_field(columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& kv : meta_) j["meta"][kv.first] = kv.second;
  j["columns"] = columns_;
  j["rows"] = rows_;
  return j.dump(2) + "\n";
}

std::string cell(const XReal& x, prec_t bits) {
  return to_scientific(x, digits_for_bits(bits));
}

std::string cell_int(std::int64_t v) { return std::to_string(v); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw error("write failed: " + path);
}

}  // namespace qtheta
