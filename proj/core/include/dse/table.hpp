#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dse {

struct Column {
  std::string name;
  std::vector<std::string> values;
};

/// A raw table of string cells. The empty string is the canonical null.
struct TableData {
  std::vector<Column> columns;
  std::size_t row_count = 0;

  const Column* find(std::string_view name) const noexcept;
  std::ptrdiff_t index_of(std::string_view name) const noexcept;

  /// Throws RaggedRows if a column length differs from row_count.
  void validate() const;
};

/// Suffixes case-insensitive duplicate names with _2, _3, ...; empty names
/// become column_<n>.
std::vector<std::string> deduplicate_names(const std::vector<std::string>& names);

/// Replaces invalid UTF-8 sequences with U+FFFD and strips a leading BOM.
std::string sanitize_utf8(std::string_view bytes);

/// RFC-4180 parse; the first record is always the header. Records whose
/// field count differs from the header raise RaggedRows.
TableData parse_csv(std::string_view bytes);

/// RFC-4180 output with LF line endings and a header row.
std::string write_csv(const TableData& table);

/// Builds a table from row-major records (used by fixtures and generators).
TableData make_table(std::vector<std::string> names,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace dse
