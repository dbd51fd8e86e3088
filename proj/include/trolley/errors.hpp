#ifndef TROLLEY_ERRORS_HPP
#define TROLLEY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trolley {

// Malformed input text (formula, game file, proof script). Carries a
// position when the source is a formula string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = 0, int col = 0)
      : std::runtime_error(pos_msg(msg, line, col)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string pos_msg(const std::string& msg, int line, int col) {
    if (line <= 0) return msg;
    return msg + " at " + std::to_string(line) + ":" + std::to_string(col);
  }
  int line_;
  int col_;
};

// Structurally well-formed input that violates a semantic constraint
// (unknown agent, unresolvable sacrifice map, bad transition, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// A configured resource cap was exceeded (weak-dilemma expansion,
// tautology atom budget, explorer pool size, profile enumeration budget).
class CapError : public std::runtime_error {
 public:
  explicit CapError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace trolley

#endif  // TROLLEY_ERRORS_HPP
