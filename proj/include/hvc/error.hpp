#pragma once

#include <stdexcept>
#include <string>

namespace hvc {

// Malformed or invalid input: case files, profiles, configurations.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Case-file syntax error; line is 1-based, 0 when unknown.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what
                            : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Newton-Raphson divergence, singular Jacobian, or islanded network.
class PowerFlowError : public std::runtime_error {
 public:
  explicit PowerFlowError(const std::string& what) : std::runtime_error(what) {}
};

class OpfError : public std::runtime_error {
 public:
  explicit OpfError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hvc
