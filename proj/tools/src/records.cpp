#include "nmfcheck_cli/records.hpp"

#include <algorithm>
#include <charconv>

#include <json.hpp>

#include "nmfcheck/matrix_io.hpp"

namespace nmfcheck::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::string json_field(const nlohmann::json& obj, const std::string& name) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  return it->dump();  // numbers such as a year
}

std::vector<DocumentRecord> parse_jsonl(std::string_view text, const RecordFields& fields,
                                        std::string_view source) {
  std::vector<DocumentRecord> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError(where(source, line_no) + ": malformed JSON record: " + e.what());
    }
    if (!obj.is_object()) throw IoError(where(source, line_no) + ": record is not an object");
    DocumentRecord d;
    d.text = json_field(obj, fields.text);
    d.group_key = json_field(obj, fields.group);
    if (d.group_key.empty()) {
      throw IngestionError(where(source, line_no) + ": missing group field '" + fields.group + "'");
    }
    auto date = json_field(obj, fields.date);
    if (!date.empty()) d.date_key = std::move(date);
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<DocumentRecord> parse_csv_records(std::string_view text, const RecordFields& fields,
                                              std::string_view source) {
  const auto rows = parse_csv(text);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto text_col = column(fields.text);
  const auto group_col = column(fields.group);
  const auto date_col = column(fields.date);
  if (text_col < 0) throw IngestionError(std::string(source) + ": no '" + fields.text + "' column");
  if (group_col < 0) {
    throw IngestionError(std::string(source) + ": no '" + fields.group + "' column");
  }

  std::vector<DocumentRecord> docs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](std::ptrdiff_t c) -> std::string {
      return c >= 0 && static_cast<std::size_t>(c) < row.size() ? row[c] : std::string();
    };
    DocumentRecord d;
    d.text = cell(text_col);
    d.group_key = cell(group_col);
    if (d.group_key.empty()) {
      throw IngestionError(std::string(source) + ": record " + std::to_string(r) +
                           " has an empty group field");
    }
    auto date = cell(date_col);
    if (!date.empty()) d.date_key = std::move(date);
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace

std::vector<DocumentRecord> parse_document_records(std::string_view text,
                                                   const RecordFields& fields,
                                                   std::string_view source) {
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') return parse_jsonl(text, fields, source);
  return parse_csv_records(text, fields, source);
}

std::vector<std::string> parse_vocabulary(std::string_view text) {
  std::vector<std::string> terms;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto term = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (term.empty()) continue;
    std::string lower(term);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
      return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    terms.push_back(std::move(lower));
  }
  return terms;
}

std::vector<double> parse_value_column(std::string_view text, std::string_view column,
                                       std::string_view source) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw IoError(std::string(source) + ": no values");
  std::size_t first = 0;
  std::size_t col = 0;
  double probe = 0.0;
  const bool has_header = !rows[0].empty() && !parse_double(rows[0][0], probe);
  if (has_header) {
    first = 1;
    if (!column.empty()) {
      const auto it = std::find(rows[0].begin(), rows[0].end(), column);
      if (it == rows[0].end()) {
        throw IoError(std::string(source) + ": no column named '" + std::string(column) + "'");
      }
      col = static_cast<std::size_t>(it - rows[0].begin());
    }
  } else if (!column.empty()) {
    throw IoError(std::string(source) + ": --column given but the file has no header");
  }
  std::vector<double> values;
  for (std::size_t r = first; r < rows.size(); ++r) {
    double v = 0.0;
    if (col >= rows[r].size() || !parse_double(rows[r][col], v)) {
      throw IoError(where(source, r + 1) + ": expected a number in column " +
                    std::to_string(col + 1));
    }
    values.push_back(v);
  }
  return values;
}

std::string format_pp_csv(const PpPlotData& pp) {
  std::string out = "theoretical,empirical,lower,upper\n";
  for (const auto& p : pp.points) {
    out += format_number(p.theoretical) + "," + format_number(p.empirical) + "," +
           format_number(std::max(0.0, p.theoretical - pp.error_band)) + "," +
           format_number(std::min(1.0, p.theoretical + pp.error_band)) + "\n";
  }
  return out;
}

}  // namespace nmfcheck::cli
