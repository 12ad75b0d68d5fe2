#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace l2boost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition (shapes, ranges, non-finite values).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Every candidate column is uncorrelated with the current residual.
class NoDescentDirection : public Error {
public:
    NoDescentDirection() : Error("no descent direction: residual is orthogonal to every candidate column") {}
};

/// A restricted least-squares problem has a numerically singular Gram matrix.
class RankDeficient : public Error {
public:
    RankDeficient(std::string what, std::vector<std::size_t> columns)
        : Error(std::move(what)), columns_(std::move(columns)) {}

    /// Columns (in the caller's indexing) found to be linearly dependent on the others.
    const std::vector<std::size_t>& columns() const noexcept { return columns_; }

private:
    std::vector<std::size_t> columns_;
};

/// The boosted first stage selected nothing, or its predictions carry no signal for d.
class WeakFirstStage : public Error {
public:
    WeakFirstStage(std::string what, std::size_t support_size)
        : Error(std::move(what)), support_size_(support_size) {}

    std::size_t support_size() const noexcept { return support_size_; }

private:
    std::size_t support_size_;
};

}  // namespace l2boost
