#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nmfcheck {

enum class ErrorKind {
  shape,
  bounds,
  domain,
  degenerate,
  numerical,
  io,
  ingestion,
};

std::string_view to_string(ErrorKind kind);

/// Base class for every error raised by the library. `kind()` lets callers
/// (the CLI in particular) map failures to stable exit codes without RTTI
/// gymnastics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};

class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error(ErrorKind::bounds, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

// All-zero input, all-zero bootstrap draws, and other inputs for which the
// factorization has no meaningful descent direction.
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorKind::degenerate, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class IngestionError : public Error {
 public:
  explicit IngestionError(const std::string& what)
      : Error(ErrorKind::ingestion, what) {}
};

}  // namespace nmfcheck
