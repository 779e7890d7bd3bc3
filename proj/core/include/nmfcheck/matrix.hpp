#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmfcheck/errors.hpp"

namespace nmfcheck {

struct CountTag {};
struct RateTag {};
struct FactorTag {};

/// Dense, row-major, immutable matrix of non-negative finite reals.
///
/// Entry (i, j) lives at `entries()[i * cols() + j]`. The tag only keeps
/// observed counts, Poisson rates and factor matrices from being mixed up
/// at API boundaries; the storage and invariants are identical.
template <class Tag>
class BasicMatrix {
 public:
  BasicMatrix() = default;

  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) {
      throw ShapeError("matrix dimensions must be positive, got " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (rows_ * cols_ != entries_.size()) {
      throw ShapeError("matrix " + std::to_string(rows_) + "x" +
                       std::to_string(cols_) + " needs " +
                       std::to_string(rows_ * cols_) + " entries, got " +
                       std::to_string(entries_.size()));
    }
    for (std::size_t n = 0; n < entries_.size(); ++n) {
      const double v = entries_[n];
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("matrix entry (" + std::to_string(n / cols_) + ", " +
                          std::to_string(n % cols_) +
                          ") must be finite and non-negative");
      }
    }
  }

  static BasicMatrix zeros(std::size_t rows, std::size_t cols) {
    return BasicMatrix(rows, cols, std::vector<double>(rows * cols, 0.0));
  }

  /// Re-tags the same entries, e.g. to treat observed counts as rates.
  template <class OtherTag>
  static BasicMatrix from(const BasicMatrix<OtherTag>& other) {
    BasicMatrix m;
    m.rows_ = other.rows();
    m.cols_ = other.cols();
    m.entries_.assign(other.entries().begin(), other.entries().end());
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  double at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw BoundsError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") outside " + std::to_string(rows_) + "x" +
                        std::to_string(cols_));
    }
    return (*this)(i, j);
  }

  std::span<const double> entries() const noexcept { return entries_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries_).subspan(i * cols_, cols_);
  }

  double sum() const noexcept {
    double s = 0.0;
    for (double v : entries_) s += v;
    return s;
  }

  bool all_zero() const noexcept {
    for (double v : entries_) {
      if (v != 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Observed document-term matrix X, words x documents.
using CountMatrix = BasicMatrix<CountTag>;
/// Poisson rate matrix, typically the reconstruction WH.
using RateMatrix = BasicMatrix<RateTag>;
/// NMF factor (W or H).
using FactorMatrix = BasicMatrix<FactorTag>;

/// Half-open column interval [begin, end).
struct ColumnRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t width() const noexcept { return end - begin; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Concatenates the document axes of `groups` in order. Every group must have
/// the same number of rows (vocabulary size).
CountMatrix stack(std::span<const CountMatrix> groups);

/// Column ranges each group occupies in `stack(groups)`.
std::vector<ColumnRange> column_ranges(std::span<const CountMatrix> groups);

CountMatrix slice_columns(const CountMatrix& x, ColumnRange range);

/// Largest absolute entrywise difference; shapes must match.
template <class A, class B>
double max_abs_difference(const BasicMatrix<A>& a, const BasicMatrix<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_difference: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    worst = std::max(worst, std::abs(a.entries()[n] - b.entries()[n]));
  }
  return worst;
}

}  // namespace nmfcheck
