#pragma once

#include <stdexcept>
#include <string>

namespace qsep {

// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

struct ParamError : Error {
  explicit ParamError(const std::string& msg) : Error(msg) {}
};

struct DivisionByZero : Error {
  explicit DivisionByZero(const std::string& msg) : Error(msg) {}
};

struct SingularError : Error {
  explicit SingularError(const std::string& msg) : Error(msg) {}
};

struct GridError : Error {
  explicit GridError(const std::string& msg) : Error(msg) {}
};

// A rank-revealing step produced a rank above the block parameter; carries
// the step (and node index for tree-shaped constructions) where it happened.
struct OrderExceeded : Error {
  int step;
  int index;
  OrderExceeded(const std::string& msg, int step_, int index_ = -1)
      : Error(msg), step(step_), index(index_) {}
};

// Randomized rank-profile sketch disagreed with the pivot block; the caller
// retries with fresh randomness.
struct ProfileMismatch : Error {
  explicit ProfileMismatch(const std::string& msg) : Error(msg) {}
};

// All retries of a Monte Carlo step failed.
struct MonteCarloFailure : Error {
  explicit MonteCarloFailure(const std::string& msg) : Error(msg) {}
};

// Malformed input file.
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace qsep
