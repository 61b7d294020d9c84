#include "star/error.hpp"

namespace star {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::unit: return "unit error";
    case ErrorKind::alignment: return "alignment error";
    case ErrorKind::unsupported_projection: return "unsupported projection";
    case ErrorKind::degenerate_histogram: return "degenerate histogram";
    case ErrorKind::no_bimodal_region: return "no bimodal region";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::ingest: return "ingest error";
    case ErrorKind::config: return "config error";
    case ErrorKind::not_found: return "not found";
  }
  return "error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::config:
      return 2;
    case ErrorKind::degenerate_histogram:
    case ErrorKind::no_bimodal_region:
      return 4;
    case ErrorKind::unit:
    case ErrorKind::alignment:
    case ErrorKind::unsupported_projection:
    case ErrorKind::io:
    case ErrorKind::ingest:
    case ErrorKind::not_found:
      return 3;
  }
  return 1;
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace star
