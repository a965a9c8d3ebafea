#pragma once

#include <stdexcept>
#include <string>

namespace readctl {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// textcore
class EmptyText : public Error {
public:
    EmptyText() : Error("text contains no word tokens") {}
};

// metrics
class DegenerateInput : public Error {
public:
    using Error::Error;
};
class EmptyReference : public Error {
public:
    EmptyReference() : Error("reference token sequence is empty") {}
};
class DimensionMismatch : public Error {
public:
    using Error::Error;
};
class EmptySide : public Error {
public:
    using Error::Error;
};

// providers
class UnknownLevel : public Error {
public:
    explicit UnknownLevel(int level)
        : Error("no prompt for target level " + std::to_string(level)), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

/// Raised by provider backends. The pipeline falls back to the input text for
/// every ProviderError except AuthError, which aborts the run.
class ProviderError : public Error {
public:
    using Error::Error;
};
class AuthError : public ProviderError {
public:
    using ProviderError::ProviderError;
};
class TimeoutError : public ProviderError {
public:
    using ProviderError::ProviderError;
};
class RateLimitExhausted : public ProviderError {
public:
    using ProviderError::ProviderError;
};
class MalformedResponse : public ProviderError {
public:
    using ProviderError::ProviderError;
};
class TransportError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

// pipeline
class CorpusHashMismatch : public Error {
public:
    using Error::Error;
};
class StorageError : public Error {
public:
    using Error::Error;
};
class AbortedByAuthError : public Error {
public:
    using Error::Error;
};
class IncompleteRun : public Error {
public:
    using Error::Error;
};

// dataset
class MissingColumn : public Error {
public:
    using Error::Error;
};
class MalformedRow : public Error {
public:
    MalformedRow(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};
class DuplicateSourceId : public Error {
public:
    using Error::Error;
};

// report
class UnknownVariable : public Error {
public:
    using Error::Error;
};

// configuration and usage problems (CLI exit code 2)
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace readctl
