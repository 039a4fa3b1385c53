#pragma once

#include <stdexcept>
#include <string>

namespace meshot {

// Base of every error the library throws. The CLI maps ConfigError to exit
// code 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MalformedInputError : public Error {
 public:
  MalformedInputError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptySceneError : public Error {
 public:
  using Error::Error;
};

class SingularGeometryError : public Error {
 public:
  using Error::Error;
};

class SpeedOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class FrameTooShortError : public Error {
 public:
  FrameTooShortError(const std::string& what, int max_feasible)
      : Error(what), max_feasible_(max_feasible) {}
  int max_feasible() const { return max_feasible_; }

 private:
  int max_feasible_;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class UndefinedSnrError : public Error {
 public:
  using Error::Error;
};

// All-zero or constant inputs where a ratio has no meaning.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshot
