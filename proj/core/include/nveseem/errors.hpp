#pragma once

#include <stdexcept>
#include <string>

namespace nveseem {

// Bad configuration, bad input text, bad input file.  The CLI maps this
// family to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(msg), line(line) {}
  int line;  // 1-based line in the offending text, 0 if not line-specific
};

// Sequence DSL syntax/structure error with source position.
class SequenceParseError : public ConfigError {
 public:
  SequenceParseError(const std::string& msg, int line, int col)
      : ConfigError(msg, line), col(col) {}
  int col;  // 1-based column
};

// Numerics cannot proceed (step size rejected, eigensolver failure,
// degenerate fit input, runaway oracle, ...).  CLI exit code 3.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nveseem
