#include "tsmin/error.hpp"

namespace tsmin {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Frontend: return "frontend";
    case ErrorKind::Io: return "io";
    case ErrorKind::Data: return "data";
    case ErrorKind::Stale: return "stale";
    case ErrorKind::Config: return "config";
    case ErrorKind::Undefined: return "undefined";
  }
  return "unknown";
}

}  // namespace tsmin
