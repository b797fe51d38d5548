#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinnlab {

// Layer shapes that do not chain, or inputs of the wrong length.
class StructureError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// A non-finite value appeared while propagating through layer `layer`.
class NonFiniteError : public std::runtime_error {
  public:
    NonFiniteError(const std::string& what, std::size_t layer)
        : std::runtime_error(what), layer_(layer) {}
    std::size_t layer() const noexcept { return layer_; }

  private:
    std::size_t layer_;
};

// Numerical solver could not meet its tolerance with the given settings.
class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace pinnlab
