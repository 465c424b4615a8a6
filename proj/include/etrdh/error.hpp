#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etrdh {

// Base for every failure raised by the library. The CLI maps subclasses to
// exit codes, so new error kinds should derive from the closest category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input bytes (image files, side-info files, key files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Image dimensions incompatible with the requested block layout.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// The histogram of a plane has no empty bin.
class NoZeroPoint : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

// Side information does not match the image it is applied to.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

// External codec process failed (non-zero exit, missing output).
class CodecError : public Error {
 public:
  using Error::Error;
};

// Decoder output did not reproduce the encoder input.
class LossyCodec : public CodecError {
 public:
  using CodecError::CodecError;
};

}  // namespace etrdh
