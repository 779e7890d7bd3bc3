#include "nmfcheck/matrix.hpp"

#include <string>

namespace nmfcheck {

std::vector<ColumnRange> column_ranges(std::span<const CountMatrix> groups) {
  std::vector<ColumnRange> ranges;
  ranges.reserve(groups.size());
  std::size_t offset = 0;
  for (const auto& g : groups) {
    ranges.push_back({offset, offset + g.cols()});
    offset += g.cols();
  }
  return ranges;
}

CountMatrix stack(std::span<const CountMatrix> groups) {
  if (groups.empty()) {
    throw ShapeError("stack: no groups given");
  }
  const std::size_t rows = groups.front().rows();
  std::size_t total_cols = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw ShapeError("stack: group " + std::to_string(g) + " is empty");
    }
    if (groups[g].rows() != rows) {
      throw ShapeError("stack: group " + std::to_string(g) + " has " +
                       std::to_string(groups[g].rows()) + " rows, expected " +
                       std::to_string(rows));
    }
    total_cols += groups[g].cols();
  }

  std::vector<double> entries(rows * total_cols);
  std::size_t offset = 0;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < rows; ++i) {
      const auto src = g.row(i);
      std::copy(src.begin(), src.end(), entries.begin() + i * total_cols + offset);
    }
    offset += g.cols();
  }
  return CountMatrix(rows, total_cols, std::move(entries));
}

CountMatrix slice_columns(const CountMatrix& x, ColumnRange range) {
  if (range.begin >= range.end || range.end > x.cols()) {
    throw BoundsError("slice_columns: interval [" + std::to_string(range.begin) +
                      ", " + std::to_string(range.end) + ") not within [0, " +
                      std::to_string(x.cols()) + ")");
  }
  const std::size_t width = range.width();
  std::vector<double> entries(x.rows() * width);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto src = x.row(i).subspan(range.begin, width);
    std::copy(src.begin(), src.end(), entries.begin() + i * width);
  }
  return CountMatrix(x.rows(), width, std::move(entries));
}

}  // namespace nmfcheck
