#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtheta/xcomplex.hpp"

namespace qtheta {

/// One rectangular result table: named columns, string cells, and a small
/// ordered key -> value preamble. Rendering is deterministic by design: cell
/// text is produced by the fixed-digit formatters below, line ends are '\n',
/// and no clock or locale state enters the output.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void set_meta(std::string key, std::string value);
  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }

  /// Header line then one line per row. Meta is not emitted: the CSV schema
  /// is exactly the pinned column set.
  std::string to_csv() const;

  /// {"meta": {...}, "columns": [...], "rows": [[...], ...]} with key order
  /// preserved, 2-space indent, trailing newline.
  std::string to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Scientific-notation cell carrying every digit the precision certifies.
std::string cell(const XReal& x, prec_t bits);
std::string cell_int(std::int64_t v);

/// Write text to path, replacing any existing file. Throws qtheta::error on
/// I/O failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qtheta
