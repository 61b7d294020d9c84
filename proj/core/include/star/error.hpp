#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace star {

enum class ErrorKind {
  parameter,
  unit,
  alignment,
  unsupported_projection,
  degenerate_histogram,
  no_bimodal_region,
  io,
  ingest,
  config,
  not_found,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status for an error category: 2 config, 3 data, 4 degenerate algorithm.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace star
