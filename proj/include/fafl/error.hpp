#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fafl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The SVD (or another factorization) did not converge.
class DecompositionError : public Error {
public:
    DecompositionError(std::ptrdiff_t rows, std::ptrdiff_t cols)
        : Error("decomposition failed for " + std::to_string(rows) + "x" + std::to_string(cols) +
                " matrix"),
          rows_(rows),
          cols_(cols) {}

    std::ptrdiff_t rows() const noexcept { return rows_; }
    std::ptrdiff_t cols() const noexcept { return cols_; }

private:
    std::ptrdiff_t rows_;
    std::ptrdiff_t cols_;
};

/// Normal equations whose Gram matrix is too ill-conditioned to be solved.
class SingularSystemError : public Error {
public:
    explicit SingularSystemError(double condition_number)
        : Error("singular normal equations (condition number " + std::to_string(condition_number) +
                ")"),
          condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// Too many Monte Carlo replications failed numerically.
class FailureCapExceeded : public Error {
public:
    using Error::Error;
};

/// Malformed user input (CSV, JSON configuration).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace fafl
