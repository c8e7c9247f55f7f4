#include "dse/table.hpp"

#include <unordered_map>

#include "dse/error.hpp"
#include "dse/strings.hpp"

namespace dse {

const Column* TableData::find(std::string_view name) const noexcept {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::ptrdiff_t TableData::index_of(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

void TableData::validate() const {
  for (const auto& c : columns) {
    if (c.values.size() != row_count) {
      throw Error(ErrorCode::RaggedRows,
                  "column '" + c.name + "' has " + std::to_string(c.values.size()) +
                      " values, expected " + std::to_string(row_count));
    }
  }
}

std::vector<std::string> deduplicate_names(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  out.reserve(names.size());
  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string base(trim(names[i]));
    if (base.empty()) base = "column_" + std::to_string(i + 1);
    std::string candidate = base;
    int n = 1;
    while (seen.contains(to_lower(candidate))) {
      candidate = base + "_" + std::to_string(++n);
    }
    seen.emplace(to_lower(candidate), 1);
    out.push_back(std::move(candidate));
  }
  return out;
}

std::string sanitize_utf8(std::string_view in) {
  if (in.size() >= 3 && static_cast<unsigned char>(in[0]) == 0xEF &&
      static_cast<unsigned char>(in[1]) == 0xBB && static_cast<unsigned char>(in[2]) == 0xBF) {
    in.remove_prefix(3);
  }
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto c = static_cast<unsigned char>(in[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len != 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(in[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (cc & 0x3F);
      }
    }
    // reject overlong encodings, surrogates and out-of-range code points
    if (ok) {
      static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
      ok = cp >= kMin[len] && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

namespace {

// Splits into records of fields; quoted fields may contain separators,
// newlines and doubled quotes.
std::vector<std::vector<std::string>> split_records(std::string_view s) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
    ++i;
  }
  end_record();
  return records;
}

bool needs_quoting(std::string_view v) {
  return v.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view v) {
  if (!needs_quoting(v)) {
    out.append(v);
    return;
  }
  out.push_back('"');
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

TableData parse_csv(std::string_view bytes) {
  const std::string text = sanitize_utf8(bytes);
  auto records = split_records(text);
  if (records.empty() || records.front().empty()) {
    throw Error(ErrorCode::EmptyTable, "CSV has no header row");
  }
  TableData table;
  const auto names = deduplicate_names(records.front());
  const std::size_t width = names.size();
  table.columns.resize(width);
  for (std::size_t c = 0; c < width; ++c) {
    table.columns[c].name = names[c];
    table.columns[c].values.reserve(records.size() - 1);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != width) {
      throw Error(ErrorCode::RaggedRows, "record " + std::to_string(r + 1) + " has " +
                                             std::to_string(rec.size()) + " fields, expected " +
                                             std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) table.columns[c].values.push_back(std::move(rec[c]));
  }
  table.row_count = records.size() - 1;
  return table;
}

std::string write_csv(const TableData& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out.push_back(',');
    append_field(out, table.columns[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.row_count; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out.push_back(',');
      const auto& v = table.columns[c].values[r];
      // a lone empty field would read back as a blank (skipped) line
      if (table.columns.size() == 1 && v.empty()) {
        out.append("\"\"");
      } else {
        append_field(out, v);
      }
    }
    out.push_back('\n');
  }
  return out;
}

TableData make_table(std::vector<std::string> names,
                     const std::vector<std::vector<std::string>>& rows) {
  TableData table;
  table.columns.resize(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) table.columns[c].name = std::move(names[c]);
  for (const auto& row : rows) {
    if (row.size() != table.columns.size()) {
      throw Error(ErrorCode::RaggedRows, "row width does not match header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) table.columns[c].values.push_back(row[c]);
  }
  table.row_count = rows.size();
  return table;
}

}  // namespace dse
