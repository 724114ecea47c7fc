// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geodiv {

/// Base class for every domain failure raised by the toolkit. The CLI maps
/// these to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed interchange record. Carries the offending file, 1-based line
/// and field name.
class IngestError : public Error {
public:
    IngestError(std::string file, std::size_t line, std::string field, const std::string& what);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

class ConflictError : public Error {
    using Error::Error;
};

class ConfigError : public Error {
    using Error::Error;
};

class DomainError : public Error {
    using Error::Error;
};

class ConsistencyError : public Error {
    using Error::Error;
};

class MissingGroupError : public Error {
    using Error::Error;
};

class DegenerateError : public Error {
    using Error::Error;
};

class InsufficientDataError : public Error {
    using Error::Error;
};

class UndefinedCorrelationError : public Error {
    using Error::Error;
};

class DivergenceError : public Error {
public:
    DivergenceError(std::size_t epoch, const std::string& what);
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class SplitError : public Error {
    using Error::Error;
};

class IoError : public Error {
    using Error::Error;
};

}  // namespace geodiv
