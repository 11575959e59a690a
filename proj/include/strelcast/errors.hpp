#pragma once

#include <stdexcept>
#include <string>

namespace strelcast {

/// Malformed or inconsistent input data (CSV/JSON content, nonpositive values, gaps).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not complete (e.g. a factorization lost positive definiteness).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A monitor was asked to look further into the future than the trace reaches.
class HorizonError : public std::invalid_argument {
 public:
  HorizonError(std::size_t required, std::size_t available)
      : std::invalid_argument("insufficient trace horizon: formula requires " +
                              std::to_string(required) + " steps, trace has " +
                              std::to_string(available)),
        required_(required),
        available_(available) {}

  [[nodiscard]] std::size_t required() const { return required_; }
  [[nodiscard]] std::size_t available() const { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

}  // namespace strelcast
