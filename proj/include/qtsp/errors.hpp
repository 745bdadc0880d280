#pragma once

#include <stdexcept>
#include <string>

namespace qtsp {

// Base of every error thrown by the library; the CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class InvalidTour : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradient : public Error {
 public:
  NonFiniteGradient(long step, std::size_t index)
      : Error("non-finite gradient entry " + std::to_string(index) + " at step " +
              std::to_string(step)),
        step_(step),
        index_(index) {}

  long step() const noexcept { return step_; }
  std::size_t index() const noexcept { return index_; }

 private:
  long step_;
  std::size_t index_;
};

}  // namespace qtsp
