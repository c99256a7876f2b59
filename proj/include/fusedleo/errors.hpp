#pragma once

#include <stdexcept>
#include <string>

namespace fusedleo {

// Base of everything the library throws. Each subclass maps onto one CLI
// exit status (see app.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class OutOfBandError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class InsufficientVisibilityError : public GeometryError {
 public:
  InsufficientVisibilityError(int cell_id, int available, int required)
      : GeometryError("cell " + std::to_string(cell_id) + ": only " + std::to_string(available) +
                      " usable SVs in view, " + std::to_string(required) + " required"),
        cell_id_(cell_id) {}
  int cell_id() const noexcept { return cell_id_; }

 private:
  int cell_id_;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

// A reservation fraction would exceed 100%.
class SaturationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fusedleo
