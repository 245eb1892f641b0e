#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace calgap {

enum class ErrorKind {
  InvalidArgument,
  EmptyInput,
  NotApplicable,
  ParseError,
  ValidationError,
  IoError,
  AbortRun,
};

const char *to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so that callers (the CLI in
// particular) can map it onto exit codes without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  // 1-based line number for parse/validation errors in file input.
  std::optional<std::size_t> line() const noexcept { return line_; }

private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

} // namespace calgap
