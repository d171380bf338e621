#pragma once

#include <stdexcept>
#include <string>

namespace ucme {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed design-spec document. `field()` names the offending entry.
class ParseError : public Error {
  public:
    ParseError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Geometry or BC computation hit a state that signals a domain bug.
class EvaluationError : public Error {
  public:
    using Error::Error;
};

class InitializationError : public Error {
  public:
    using Error::Error;
};

/// Caller broke the interaction protocol (e.g. selecting an elite that was never offered).
class ProtocolError : public Error {
  public:
    using Error::Error;
};

} // namespace ucme
