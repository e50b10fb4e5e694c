#pragma once

#include <stdexcept>
#include <string>

namespace ridge {

// Bad input data or a mathematically ill-posed request (CLI exit code 1).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(std::size_t pivot_index, double pivot)
        : Error("matrix is not positive definite: pivot " + std::to_string(pivot_index) +
                " has value " + std::to_string(pivot)),
          index_(pivot_index) {}
    std::size_t pivot_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Raised by routines that accept a wall-clock deadline.
class DeadlineExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace ridge
