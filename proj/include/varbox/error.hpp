#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varbox {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input does not agree in dimension or structure with what an operation expects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace varbox
