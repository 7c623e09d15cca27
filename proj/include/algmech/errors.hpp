#ifndef ALGMECH_ERRORS_HPP
#define ALGMECH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace algmech {

// Syntax error in the expression grammar; offset is a byte position into
// the source text.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t offset)
      : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Unbound variable or domain error during evaluation; carries the offending
// subexpression in printed form.
class EvalError : public std::runtime_error {
public:
  EvalError(const std::string& message, std::string subexpr)
      : std::runtime_error(message + " in '" + subexpr + "'"),
        subexpr_(std::move(subexpr)) {}

  const std::string& subexpr() const { return subexpr_; }

private:
  std::string subexpr_;
};

// Mismatched array shapes or violated structural preconditions.
class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& message) : std::runtime_error(message) {}
};

// Singular Hessian, Newton non-convergence, singular metric: the explicit
// field does not exist at the requested point.
class DegeneracyError : public std::runtime_error {
public:
  explicit DegeneracyError(const std::string& message) : std::runtime_error(message) {}
};

// Invalid configuration document; message carries the field path.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace algmech

#endif
