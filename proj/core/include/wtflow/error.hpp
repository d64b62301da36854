// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wtflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated (shape, range, empty input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent external data (files, CSV, labels).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A conditional field was evaluated where its path is undefined.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Non-finite values appeared during a numerical procedure.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Euler integration produced a non-finite state.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, std::size_t step)
        : NumericalError(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace wtflow
