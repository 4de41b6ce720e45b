#pragma once

#include <stdexcept>
#include <string>

namespace projgeo {

enum class ErrorKind {
  Input,           // malformed or non-finite input, shape mismatch
  Domain,          // function undefined on part of a spectrum
  Rank,            // matrix numerically singular
  Branch,          // unitary spectrum touches -1, principal log undefined
  NotIdempotent,
  Degeneracy,      // E + E* - 1 singular
  Tolerance,       // rank decision falls inside the ambiguity band
  Geometry,        // ||P - Q|| too close to 1
  Truncation,      // finite section too coarse for validation
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace projgeo
