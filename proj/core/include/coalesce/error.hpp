#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coalesce {

enum class ErrorKind {
  invalid_parameter,
  not_bracketed,
  above_threshold,
  divergent_sensitivity,
  edge_truncation,
  pair_identification,
  internal_consistency,
};

/// Stable lower-case token for an error kind, e.g. "above_threshold".
std::string_view error_token(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a machine-readable token.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view token() const noexcept { return error_token(kind_); }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

}  // namespace detail
}  // namespace coalesce
