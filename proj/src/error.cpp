#include "srs/error.hpp"

namespace srs {

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::numerical: return "numerical failure";
    case ErrorKind::format: return "format error";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

}  // namespace srs
