#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmfcheck/matrix.hpp"

namespace nmfcheck {

/// Matrix CSV layout: one row per vocabulary word, one column per document.
/// An optional first row holds document labels and an optional first column
/// holds word labels; either is detected by the presence of non-numeric cells.
struct LabeledMatrix {
  CountMatrix matrix;
  std::vector<std::string> row_labels;  // empty when the file had none
  std::vector<std::string> col_labels;  // empty when the file had none
};

/// RFC 4180 style records: quoted fields may contain separators, doubled
/// quotes and newlines. Blank lines are dropped.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// The first row is a header when its first cell is empty or any later cell is
/// non-numeric; a non-numeric first column holds row labels.
LabeledMatrix parse_matrix_csv(std::string_view text, std::string_view source = "<memory>");
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

/// Shortest representation that round-trips through `parse_matrix_csv`.
std::string format_number(double value);

std::string format_matrix_csv(std::size_t rows, std::size_t cols,
                              std::span<const double> entries,
                              std::span<const std::string> row_labels = {},
                              std::span<const std::string> col_labels = {});

template <class Tag>
std::string format_matrix_csv(const BasicMatrix<Tag>& m,
                              std::span<const std::string> row_labels = {},
                              std::span<const std::string> col_labels = {}) {
  return format_matrix_csv(m.rows(), m.cols(), m.entries(), row_labels, col_labels);
}

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace nmfcheck
