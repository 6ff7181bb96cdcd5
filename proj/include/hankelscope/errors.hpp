#pragma once

#include <stdexcept>
#include <string>

namespace hankelscope {

/// Argument outside the domain of a profile function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// An operation was called on a domain that does not satisfy its precondition
/// (typically completeness).
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

/// The theorem being cross-checked does not apply (e.g. non-convex shadow).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CacheIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed domain or symbol spec. `field()` names the offending JSON field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace hankelscope
