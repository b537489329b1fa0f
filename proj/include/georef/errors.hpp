#pragma once

#include <stdexcept>
#include <string>

namespace georef {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input documents that fail schema or invariant checks. The CLI maps this to exit code 3.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownRelation : public Error {
 public:
  explicit UnknownRelation(std::string phrase)
      : Error("unknown relation phrase: '" + phrase + "'"), phrase_(std::move(phrase)) {}

  const std::string& phrase() const noexcept { return phrase_; }

 private:
  std::string phrase_;
};

/// A topological relation was requested against a relatum that is not a polygon.
class NoSearchSpace : public Error {
 public:
  using Error::Error;
};

/// No K-function bin satisfies the density threshold and argmax rule.
class NoClusterSignal : public Error {
 public:
  using Error::Error;
};

}  // namespace georef
