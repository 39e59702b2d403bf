#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lbpforge {

// Every library failure derives from Error. DataError marks failures caused by
// the input data (bad equation text, missing frames, mismatched sizes); the
// CLI maps those to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public DataError {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : DataError(message + " at byte " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ExhaustionError : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class ImageTooSmall : public DataError {
 public:
  using DataError::DataError;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class BinMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class MissingFrame : public DataError {
 public:
  using DataError::DataError;
};

class PairMismatch : public DataError {
 public:
  using DataError::DataError;
};

class DecodeError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace lbpforge
