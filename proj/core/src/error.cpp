#include "cardsketch/error.hpp"

namespace cardsketch {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::IndexOutOfRange: return "index-out-of-range";
    case ErrorKind::UnsupportedDeletion: return "unsupported-deletion";
    case ErrorKind::IncompatibleSketch: return "incompatible-sketch";
    case ErrorKind::EmptySketch: return "empty-sketch";
    case ErrorKind::DegenerateSketch: return "degenerate-sketch";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Saturation: return "saturation";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Format: return "format";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cardsketch
