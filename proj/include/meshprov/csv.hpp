#pragma once

// Minimal RFC 4180 CSV reading and writing (UTF-8, LF line endings).

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "meshprov/error.hpp"

namespace meshprov::csv {

using Row = std::vector<std::string>;

inline bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\n\r") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view field) {
  if (!needs_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    write_field(out, row[i]);
  }
  out << '\n';
}

/// Reads every record; quoted fields may hold commas, doubled quotes and newlines.
/// A trailing CR before LF is dropped. Blank lines are skipped.
inline std::vector<Row> read_all(std::istream& in) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  char c;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row_has_content) {
      end_field();
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    row_has_content = false;
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row_has_content = true;
        end_field();
        break;
      case '\r':
        if (in.peek() != '\n') field.push_back(c);
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  end_row();
  return rows;
}

inline std::vector<Row> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_all(in);
}

/// Writes rows to `path` (header first), creating parent directories.
inline void write_file(const std::filesystem::path& path, const Row& header, const std::vector<Row>& rows) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_row(out, header);
  for (const auto& r : rows) write_row(out, r);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

/// Checks that `rows` starts with exactly `header`; returns the data rows.
inline std::vector<Row> expect_header(std::vector<Row> rows, const Row& header, const std::string& what) {
  if (rows.empty() || rows.front() != header) {
    std::ostringstream msg;
    msg << what << ": unexpected or missing header";
    throw Error(msg.str());
  }
  rows.erase(rows.begin());
  return rows;
}

}  // namespace meshprov::csv
