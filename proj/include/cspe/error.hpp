#ifndef CSPE_ERROR_HPP
#define CSPE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cspe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An event-set expression mentions a variable that no binder closes.
class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(std::string variable)
      : Error("unbound event variable '" + variable + "'"),
        variable_(std::move(variable)) {}

  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

/// A term with free variables was handed to an operation that needs a
/// closed one.
class OpenTermError : public Error {
 public:
  explicit OpenTermError(const std::string& what) : Error(what) {}
};

/// An event that is not a member of the declared alphabet.
class UnknownEventError : public Error {
 public:
  explicit UnknownEventError(std::string event)
      : Error("event '" + event + "' is not in the alphabet"),
        event_(std::move(event)) {}

  const std::string& event() const noexcept { return event_; }

 private:
  std::string event_;
};

/// The monitor's residual set grew past its configured cap.
class ResidualOverflowError : public Error {
 public:
  ResidualOverflowError(std::size_t size, std::size_t cap)
      : Error("residual set size " + std::to_string(size) +
              " exceeds cap " + std::to_string(cap)) {}
};

}  // namespace cspe

#endif  // CSPE_ERROR_HPP
