#include "nmfcheck/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace nmfcheck {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

bool is_number(std::string_view cell) { return parse_number(cell).has_value(); }

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t n = 0; n < text.size(); ++n) {
    const char c = text[n];
    if (in_quotes) {
      if (c == '"') {
        if (n + 1 < text.size() && text[n + 1] == '"') {
          field += '"';
          ++n;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
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
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  end_record();
  return records;
}

LabeledMatrix parse_matrix_csv(std::string_view text, std::string_view source) {
  const std::string where(source);
  auto records = parse_csv(text);
  if (records.empty()) {
    throw IoError(where + ": no matrix rows");
  }

  LabeledMatrix out;
  std::size_t first_data = 0;
  std::vector<std::string> header;
  // A lone non-numeric first cell is a row label, unless it is an empty corner.
  const auto& top = records.front();
  bool is_header = !top.empty() && trim(top.front()).empty();
  for (std::size_t c = 1; c < top.size() && !is_header; ++c) is_header = !is_number(top[c]);
  if (top.size() == 1 && !is_number(top.front())) is_header = true;
  if (is_header) {
    header = top;
    first_data = 1;
  }
  if (first_data == records.size()) {
    throw IoError(where + ": header row but no data rows");
  }

  bool has_row_labels = false;
  for (std::size_t r = first_data; r < records.size(); ++r) {
    if (!records[r].empty() && !is_number(records[r].front())) {
      has_row_labels = true;
      break;
    }
  }

  const std::size_t label_cols = has_row_labels ? 1 : 0;
  const std::size_t width = records[first_data].size();
  if (width <= label_cols) {
    throw IoError(where + ": row 1 has no numeric cells");
  }
  const std::size_t cols = width - label_cols;
  const std::size_t rows = records.size() - first_data;

  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw IoError(where + ": line " + std::to_string(r + 1) + " has " +
                    std::to_string(rec.size()) + " fields, expected " +
                    std::to_string(width));
    }
    if (has_row_labels) out.row_labels.emplace_back(trim(rec.front()));
    for (std::size_t c = label_cols; c < width; ++c) {
      const auto v = parse_number(rec[c]);
      if (!v) {
        throw IoError(where + ": line " + std::to_string(r + 1) + " column " +
                      std::to_string(c + 1) + " is not a number: '" + rec[c] + "'");
      }
      entries.push_back(*v);
    }
  }

  if (!header.empty()) {
    std::size_t skip = 0;
    if (header.size() == cols + 1) {
      skip = 1;
    } else if (header.size() != cols) {
      throw IoError(where + ": header has " + std::to_string(header.size()) +
                    " fields for " + std::to_string(cols) + " columns");
    }
    for (std::size_t c = skip; c < header.size(); ++c) {
      out.col_labels.emplace_back(trim(header[c]));
    }
  }

  try {
    out.matrix = CountMatrix(rows, cols, std::move(entries));
  } catch (const DomainError& e) {
    throw DomainError(where + ": " + e.what());
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("error while reading '" + path.string() + "'");
  }
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw IoError("error while writing '" + path.string() + "'");
  }
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_text_file(path), path.string());
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_matrix_csv(std::size_t rows, std::size_t cols,
                              std::span<const double> entries,
                              std::span<const std::string> row_labels,
                              std::span<const std::string> col_labels) {
  if (rows * cols != entries.size()) {
    throw ShapeError("format_matrix_csv: entry count does not match shape");
  }
  if (!row_labels.empty() && row_labels.size() != rows) {
    throw ShapeError("format_matrix_csv: row label count does not match rows");
  }
  if (!col_labels.empty() && col_labels.size() != cols) {
    throw ShapeError("format_matrix_csv: column label count does not match cols");
  }
  std::string out;
  if (!col_labels.empty()) {
    if (!row_labels.empty()) out += "term,";
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out += ',';
      out += quote_if_needed(col_labels[c]);
    }
    out += '\n';
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_labels.empty()) {
      out += quote_if_needed(row_labels[r]);
      out += ',';
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out += ',';
      out += format_number(entries[r * cols + c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace nmfcheck
