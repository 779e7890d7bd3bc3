#include "nmfcheck/errors.hpp"

namespace nmfcheck {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::bounds: return "bounds";
    case ErrorKind::domain: return "domain";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
    case ErrorKind::ingestion: return "ingestion";
  }
  return "unknown";
}

}  // namespace nmfcheck
