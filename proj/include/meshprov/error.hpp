#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace meshprov {

/// Base of every error thrown by the library. The CLI maps all of them to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed XML. Carries the byte offset reported by the parser.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}

  std::int64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::int64_t byte_offset_;
};

/// A structural rule of the thesaurus was violated (e.g. a concept in two descriptors).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid row in the overrides file.
class OverrideError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshprov
