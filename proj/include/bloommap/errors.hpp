#pragma once

#include <stdexcept>
#include <string>

namespace bloommap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class InvalidEpsilon : public Error {
 public:
  using Error::Error;
};

class InvalidScheme : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class EmptyMap : public Error {
 public:
  using Error::Error;
};

class UnknownValue : public Error {
 public:
  using Error::Error;
};

class DuplicateKey : public Error {
 public:
  using Error::Error;
};

class FrozenError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised on malformed map files. field() names the part that failed
// validation ("magic", "version", "checksum", ...).
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error("format error in " + field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace bloommap
