#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nmfcheck/corpus.hpp"
#include "nmfcheck/stat.hpp"

namespace nmfcheck::cli {

struct RecordFields {
  std::string text = "text";
  std::string group = "group";
  std::string date = "date";
};

/// Document records from line-delimited JSON (one object per line) or from
/// CSV with a header row naming the fields. The format is sniffed from the
/// first non-blank character. A missing or empty date field means "no date".
std::vector<DocumentRecord> parse_document_records(std::string_view text,
                                                   const RecordFields& fields,
                                                   std::string_view source = "<memory>");

/// One term per line; surrounding whitespace is trimmed, terms are
/// lowercased to match tokenization, blank lines are skipped.
std::vector<std::string> parse_vocabulary(std::string_view text);

/// A single numeric column from CSV. With a header, `column` selects it by
/// name (empty means the first column).
std::vector<double> parse_value_column(std::string_view text, std::string_view column,
                                       std::string_view source = "<memory>");

std::string format_pp_csv(const PpPlotData& pp);
std::string render_pp_svg(const PpPlotData& pp, std::string_view title);

}  // namespace nmfcheck::cli
